"""
Experiment file handling

The experiment file is JSON with the sections scenario, policy, curiosity
and training plus an output_dir string. Omitted keys take their defaults,
unknown keys are rejected.
"""
import dataclasses
import json
import logging
import typing
from dataclasses import dataclass, field

from hypnav.curiosity.CuriosityConfig import CuriosityConfig
from hypnav.errors import ConfigError
from hypnav.policy.PolicyConfig import PolicyConfig
from hypnav.sim.ScenarioConfig import ScenarioConfig
from hypnav.training.TrainRunConfig import TrainRunConfig

logger = logging.getLogger(__name__)

SECTIONS = {
    'scenario': ScenarioConfig,
    'policy': PolicyConfig,
    'curiosity': CuriosityConfig,
    'training': TrainRunConfig,
}


def _coerce(section, name, annotation, value):
    """
    Check a JSON value against a dataclass field annotation
    """
    where = "{0}.{1}".format(section, name)
    origin = typing.get_origin(annotation)
    if origin is typing.Union:
        options = [a for a in typing.get_args(annotation) if a is not type(None)]
        if value is None:
            return None
        return _coerce(section, name, options[0], value)
    if origin in (tuple, typing.Tuple):
        if not isinstance(value, (list, tuple)):
            raise ConfigError("{0} must be a list, got {1!r}".format(where, value))
        item_type = typing.get_args(annotation)[0]
        return tuple(_coerce(section, name, item_type, item) for item in value)
    if annotation is bool:
        if not isinstance(value, bool):
            raise ConfigError("{0} must be true or false, got {1!r}".format(where, value))
        return value
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("{0} must be an integer, got {1!r}".format(where, value))
        return value
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError("{0} must be a number, got {1!r}".format(where, value))
        return float(value)
    if annotation is str:
        if not isinstance(value, str):
            raise ConfigError("{0} must be a string, got {1!r}".format(where, value))
        return value
    return value


def section_from_dict(section, cls, data):
    if not isinstance(data, dict):
        raise ConfigError("Section '{0}' must be an object".format(section))
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError("Unknown key(s) in section '{0}': {1}".format(
            section, ', '.join(unknown)))
    values = {name: _coerce(section, name, hints[name], value)
              for name, value in data.items()}
    return cls(**values).validate()


@dataclass
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    curiosity: CuriosityConfig = field(default_factory=CuriosityConfig)
    training: TrainRunConfig = field(default_factory=TrainRunConfig)
    output_dir: str = 'output'

    def validate(self):
        for section in SECTIONS:
            getattr(self, section).validate()
        if self.curiosity.embed_dim != self.policy.embed_dim:
            raise ConfigError("curiosity.embed_dim ({0}) must equal policy.embed_dim "
                              "({1})".format(self.curiosity.embed_dim,
                                             self.policy.embed_dim))
        return self

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("Experiment config must be a JSON object")
        unknown = sorted(set(data) - set(SECTIONS) - {'output_dir'})
        if unknown:
            raise ConfigError("Unknown section(s): {0}".format(', '.join(unknown)))
        sections = {name: section_from_dict(name, section_cls, data.get(name, {}))
                    for name, section_cls in SECTIONS.items()}
        output_dir = data.get('output_dir', 'output')
        if not isinstance(output_dir, str):
            raise ConfigError("output_dir must be a string")
        return cls(output_dir=output_dir, **sections).validate()

    def to_dict(self):
        data = {name: dataclasses.asdict(getattr(self, name)) for name in SECTIONS}
        for section in data.values():
            for key, value in section.items():
                if isinstance(value, tuple):
                    section[key] = list(value)
        data['output_dir'] = self.output_dir
        return data

    @classmethod
    def load(cls, path):
        with open(path) as handle:
            text = handle.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise ConfigError("{0}: invalid JSON at line {1}, column {2}: {3}".format(
                path, error.lineno, error.colno, error.msg))
        config = cls.from_dict(data)
        logger.info("Loaded experiment config %s", path)
        return config

    def save(self, path):
        with open(path, 'w') as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)
            handle.write('\n')


def sidecar_path(checkpoint_path):
    return checkpoint_path + '.json'
