# tests/conftest.py
from __future__ import annotations

from collections.abc import Iterator

import pytest

from holder_lab.core.config import Settings, get_settings
from holder_lab.modules.almond.service import AlmondService
from holder_lab.modules.approx.service import ApproxService
from holder_lab.modules.ciesielski.service import CiesielskiService
from holder_lab.modules.holder.service import HolderService


@pytest.fixture
def settings(tmp_path, monkeypatch) -> Iterator[Settings]:
    monkeypatch.setenv("HL_OUTPUT_ROOT", str(tmp_path / "output"))
    monkeypatch.setenv("HL_WORKERS", "2")
    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()


@pytest.fixture
def holder(settings: Settings) -> HolderService:
    return HolderService(settings)


@pytest.fixture
def approx(settings: Settings, holder: HolderService) -> ApproxService:
    return ApproxService(settings, holder)


@pytest.fixture
def almond(settings: Settings, approx: ApproxService) -> AlmondService:
    return AlmondService(settings, approx)


@pytest.fixture
def ciesielski() -> CiesielskiService:
    return CiesielskiService(workers=2)
