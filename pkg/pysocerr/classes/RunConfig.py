import copy

from ..exceptions import ConfigurationError


class RunConfig:
    """
    Fully resolved parameters of one CLI command.

    Values are layered: command defaults, then the JSON config file, then explicit flags. A flag left at None does
    not override anything underneath it. The resolved record is written verbatim into every output sidecar, and a
    sidecar handed back as `--config` reproduces the run.
    """

    def __init__(self, command, params, required=()):
        """
        :param command: [string] The CLI command, e.g. 'mc'.
        :param params: [dict] The resolved parameters.
        :param required: [iterable] Keys that must be present and not None.
        """
        if not isinstance(params, dict):
            raise TypeError("`params` must be a dict")
        missing = [key for key in required if params.get(key) is None]
        if missing:
            raise ConfigurationError(f"Command '{command}' is missing required parameter(s): {missing}")
        self.__command = command
        self.__params = copy.deepcopy(params)

    @classmethod
    def resolve(cls, command, defaults, file_config=None, flags=None, required=()):
        """
        Layer `defaults` < `file_config` < `flags` into a `RunConfig`.

        `file_config` may be a plain parameter dict or a sidecar, i.e. a dict with the parameters under 'config'.
        Keys of the file that the command does not know raise a `ConfigurationError`.
        """
        params = copy.deepcopy(defaults)
        file_config = dict(file_config or {})
        if 'config' in file_config and isinstance(file_config['config'], dict):
            sidecar_command = file_config.get('command')
            if sidecar_command is not None and sidecar_command != command:
                raise ConfigurationError(f"Sidecar was written by '{sidecar_command}', not '{command}'")
            file_config = file_config['config']
        unknown = set(file_config) - set(defaults)
        if unknown:
            raise ConfigurationError(f"Unknown parameter(s) for '{command}': {sorted(unknown)}")
        params.update(file_config)
        params.update({key: value for key, value in (flags or {}).items() if value is not None})
        return cls(command, params, required)

    @property
    def command(self):
        return self.__command

    @property
    def params(self):
        return copy.deepcopy(self.__params)

    def __getitem__(self, key):
        try:
            return self.__params[key]
        except KeyError:
            raise ConfigurationError(f"Command '{self.command}' has no parameter '{key}'")

    def get(self, key, default=None):
        return self.__params.get(key, default)

    def to_dict(self):
        return {'command': self.command, 'config': self.params}

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return ('\n'.join([f"<RunConfig: {self.command}"] +
                          [f"{key}: {value}" for key, value in sorted(self.__params.items())]) + '>')
