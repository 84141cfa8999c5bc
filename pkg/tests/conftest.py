import pytest

from gsdelay.reports import _table_design


@pytest.fixture(scope="session")
def table_design():
    """Cached builder for the standard delay-study designs.

    (alpha 0.05, beta 0.1, tau 0.5, WT shape 0.25, binding futility 0.)
    """

    def build(num_stages: int, spacing: str = "equal"):
        return _table_design(num_stages, spacing, 301)

    return build
