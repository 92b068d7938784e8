import pytest

from tfim_locc import SweepConfig, build_report, run_sweep

CI_SIZES = (4, 6, 8, 10, 12, 14, 16)


@pytest.fixture(scope="session")
def ci_sweep(tmp_path_factory):
    """Default-grid sweep over the CI-scale sizes, shared by the suite.

    Cached in a session temp dir so acceptance and property tests reuse
    one set of solves.
    """
    config = SweepConfig(
        sizes=CI_SIZES,
        cache_dir=str(tmp_path_factory.mktemp("sweep-cache")),
        workers=2,
    )
    records = run_sweep(config)
    bundle = build_report(records, config)
    return records, config, bundle
