from utils.config import settings
from utils.database import db

__all__ = ["db", "settings"]
