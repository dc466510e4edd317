from dataclasses import dataclass
from typing import Optional, Tuple

from hypnav.errors import ConfigError


@dataclass
class PolicyConfig:
    """
    Policy section of the experiment file

    The default widths give about 60K parameters at embed_dim 2 and about
    124K at embed_dim 128.
    """
    embed_dim: int = 2
    robot_phi_hidden: Tuple[int, ...] = (150, 150)
    human_phi_hidden: Tuple[int, ...] = (150, 150)
    phi_dim: int = 32
    gat_dim: int = 32
    head_hidden: Optional[int] = None
    epsilon_start: float = 0.5
    epsilon_end: float = 0.02
    epsilon_decay_episodes: int = 4000

    def validate(self):
        if self.embed_dim < 2:
            raise ConfigError("policy.embed_dim must be >= 2, got {0}".format(
                self.embed_dim))
        for name in ('phi_dim', 'gat_dim'):
            if getattr(self, name) <= 0:
                raise ConfigError("policy.{0} must be positive".format(name))
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ConfigError("policy epsilon schedule needs 0 <= end <= start <= 1")
        return self

    @property
    def head_width(self):
        return self.head_hidden if self.head_hidden is not None else self.embed_dim

    def epsilon(self, episode):
        """
        Linear decay from epsilon_start to epsilon_end, then constant
        """
        if self.epsilon_decay_episodes <= 0:
            return self.epsilon_end
        fraction = min(episode / float(self.epsilon_decay_episodes), 1.0)
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * fraction
