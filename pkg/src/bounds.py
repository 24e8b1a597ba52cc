"""
Exploration and checking bounds.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .config import Config


class ExplorationBounds(BaseModel):
    """Limits for state-space exploration."""
    model_config = ConfigDict(frozen=True)

    max_states: int = Field(default=Config.MAX_STATES, gt=0, description="Maximum number of distinct states")
    max_queue: int = Field(default=Config.MAX_QUEUE, gt=0, description="Maximum length of any one channel")

    @classmethod
    def from_config(cls, config: Optional[Config] = None) -> "ExplorationBounds":
        config = config or Config()
        return cls(max_states=config.MAX_STATES, max_queue=config.MAX_QUEUE)


class CheckBounds(BaseModel):
    """Limits for type checking and inference."""
    model_config = ConfigDict(frozen=True)

    max_visited: int = Field(default=Config.MAX_STATES, gt=0, description="Maximum (type, session) pairs visited")
    max_queue: int = Field(default=Config.MAX_QUEUE, gt=0, description="Maximum length of any one channel")

    @classmethod
    def from_config(cls, config: Optional[Config] = None) -> "CheckBounds":
        config = config or Config()
        return cls(max_visited=config.MAX_STATES, max_queue=config.MAX_QUEUE)

    def exploration(self) -> ExplorationBounds:
        return ExplorationBounds(max_states=self.max_visited, max_queue=self.max_queue)
