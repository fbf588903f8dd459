import json
import logging
import logging.handlers


_RESERVED = set(logging.makeLogRecord({}).__dict__) | {'message', 'asctime'}


class JsonFormatter(logging.Formatter):
    """Render each record as a single JSON object.

    Fields passed through ``extra`` (for example N, seed or scenario) are
    copied next to the standard time, level, logger and message keys.
    ``timestamps=False`` leaves out the time key.

    Example Usage:
    >>> import logging
    >>> logger = logging.getLogger('example_log')
    >>> handler = logging.StreamHandler()
    >>> handler.setFormatter(JsonFormatter())
    >>> logger.addHandler(handler)
    >>> logger.info('cell finished', extra={'N': 100, 'seed': 3})
    """

    def __init__(self, timestamps=True):
        super(JsonFormatter, self).__init__()
        self.timestamps = timestamps

    def format(self, record):
        payload = {
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }
        if self.timestamps:
            payload['time'] = self.formatTime(record)
        for key, value in record.__dict__.items():
            if key not in _RESERVED and not key.startswith('_'):
                payload[key] = value
        if record.exc_info:
            payload['exc_info'] = self.formatException(record.exc_info)
        return json.dumps(payload, sort_keys=True, default=str)


class JsonFileHandler(logging.handlers.WatchedFileHandler):
    """Append JSON lines to ``filename``."""

    def __init__(self, filename, mode='a', timestamps=True):
        super(JsonFileHandler, self).__init__(filename, mode=mode)
        self.setFormatter(JsonFormatter(timestamps=timestamps))


def configure_logging(config, log_file=None):
    """Set the root level from ``config`` and install the handlers.

    A stderr stream handler is always present; a JSON-lines file handler is
    added for ``log_file`` or, failing that, ``config.log_file``.
    """
    root = logging.getLogger()
    root.setLevel(config.log_level)

    if not any(getattr(h, '_fluidaoi', False) for h in root.handlers):
        stream = logging.StreamHandler()
        stream.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s %(name)s: %(message)s'))
        stream.setLevel(config.log_level)
        stream._fluidaoi = True
        root.addHandler(stream)

    log_file = log_file or config.log_file
    if log_file is not None:
        handler = JsonFileHandler(log_file)
        handler._fluidaoi = True
        root.addHandler(handler)
        return handler
