from dataclasses import dataclass

from hypnav.errors import ConfigError


@dataclass
class TrainRunConfig:
    episodes: int = 10000
    eval_every: int = 500
    eval_episodes: int = 100
    lr: float = 1e-3
    gamma: float = 0.9
    batch_size: int = 128
    capacity: int = 100000
    target_sync: int = 1000
    warmup: int = 2000
    huber_delta: float = 1.0
    eval_workers: int = 1
    seed: int = 0

    def validate(self):
        if self.episodes < 0:
            raise ConfigError("training.episodes must be >= 0")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError("training.gamma must lie in (0, 1), got {0}".format(self.gamma))
        for name in ('eval_every', 'eval_episodes', 'batch_size', 'capacity',
                     'target_sync', 'eval_workers'):
            if getattr(self, name) <= 0:
                raise ConfigError("training.{0} must be positive".format(name))
        if self.lr <= 0:
            raise ConfigError("training.lr must be positive")
        if self.warmup < 0:
            raise ConfigError("training.warmup must be >= 0")
        return self
