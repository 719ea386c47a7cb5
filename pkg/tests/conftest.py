import os
from unittest.mock import patch

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from utils.config import settings
from utils.database import Base, Database

# Hypothesis profiles: "fast" for local runs, "ci" for the full sweep
hypothesis_settings.register_profile(
    "fast", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.register_profile(
    "ci", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


# Test database fixture
@pytest.fixture
def in_memory_db():
    """Create an in-memory SQLite database for testing"""
    engine = create_engine("sqlite:///:memory:", echo=False, poolclass=StaticPool)

    # Create all tables
    Base.metadata.create_all(engine)

    yield engine

    # Drop all tables
    Base.metadata.drop_all(engine)
    engine.dispose()


@pytest.fixture
def db_session(in_memory_db):
    """Create a database session for testing"""
    session = sessionmaker(bind=in_memory_db, expire_on_commit=False)()
    try:
        yield session
    finally:
        session.close()


@pytest.fixture
def memory_database():
    """A Database object bound to an in-memory SQLite URL"""
    database = Database("sqlite://")
    database.init_models()
    return database


@pytest.fixture
def override_settings():
    """Patch fields of the global settings object for one test"""
    patchers = []

    def apply(**overrides):
        for name, value in overrides.items():
            patcher = patch.object(settings, name, value)
            patcher.start()
            patchers.append(patcher)
        return settings

    yield apply

    for patcher in reversed(patchers):
        patcher.stop()



def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running sweeps (deselect with -m 'not slow')")
