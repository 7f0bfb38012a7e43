import pytest

from src.channel.core import ChannelParams
from src.config import LabConfig


@pytest.fixture
def config():
    return LabConfig(workers=1)


@pytest.fixture
def scheme1_channel():
    return ChannelParams.of(2, 1, 1, 2)


@pytest.fixture
def scheme2_channel():
    return ChannelParams.of(2, 1, 0, 1)
