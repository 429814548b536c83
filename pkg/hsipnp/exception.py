class HsiPnpError(Exception):
    pass


class DimensionError(HsiPnpError):
    pass


class SpecError(HsiPnpError):
    pass


class DegenerateResidualError(HsiPnpError):
    def __init__(self, message: str = 'Residual is identically zero, whiteness is undefined'):
        super().__init__(message)


class SingularSystemError(HsiPnpError):
    pass


class WeightsError(HsiPnpError):
    pass


class DataError(HsiPnpError):
    pass


class MetricError(HsiPnpError):
    pass


class ConfigError(HsiPnpError):
    pass


class CliUsageError(HsiPnpError):
    pass


class FormatError(HsiPnpError):
    def __init__(self, message: str, offset: int = 0):
        self.message = message
        self.offset = offset
        super().__init__(f'{message} at byte {offset}')
