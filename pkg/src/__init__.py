# Mixed-Choice Session Verifier
