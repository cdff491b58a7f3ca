import os
from fractions import Fraction

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:  # python-dotenv is optional at runtime
    pass


class Config:
    MAX_RETRIES = 5
    LOG_LEVEL = 'INFO'
    LOG_DIR = 'logs'
    LOG_FILE = 'chebfinite.log'
    WORKERS = 1
    DIGITS = 30
    KERNEL_TOLERANCE = '1/1000'

    @classmethod
    def max_retries(cls) -> int:
        """Solver retry cap; DFC_MAX_RETRIES is read on every call."""
        return int(os.environ.get('DFC_MAX_RETRIES', cls.MAX_RETRIES))

    @classmethod
    def log_level(cls) -> str:
        return os.environ.get('DFC_LOG_LEVEL', cls.LOG_LEVEL)

    @classmethod
    def log_dir(cls) -> str:
        return os.environ.get('DFC_LOG_DIR', cls.LOG_DIR)

    @classmethod
    def log_file(cls) -> str:
        return os.environ.get('DFC_LOG_FILE', cls.LOG_FILE)

    @classmethod
    def workers(cls) -> int:
        return max(1, int(os.environ.get('DFC_WORKERS', cls.WORKERS)))

    @classmethod
    def digits(cls) -> int:
        return int(os.environ.get('DFC_DIGITS', cls.DIGITS))

    @classmethod
    def kernel_tolerance(cls) -> Fraction:
        return Fraction(os.environ.get('DFC_KERNEL_TOLERANCE', cls.KERNEL_TOLERANCE))
