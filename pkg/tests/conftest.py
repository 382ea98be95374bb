"""Shared fixtures: a small trained checkpoint and dataset writers.

Also collects the acceptance-criteria results and prints one line per
criterion at the end of the run.
"""

from __future__ import annotations

import io

import pytest

from imitrans.config import TrainConfig
from imitrans.data_io import save_checkpoint
from imitrans.synthetic import grammar_pairs
from imitrans.training import train

ACCEPTANCE_PREFIX = "test_acceptance"
_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or ACCEPTANCE_PREFIX not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance_results):
        terminalreporter.write_line(f"{outcome:6s} {name}")


@pytest.fixture(scope="session")
def tiny_result():
    """A small model trained on a slice of the synthetic grammar."""
    samples = grammar_pairs(120, seed=9)
    cfg = TrainConfig(
        objective="il-nll",
        rollout_mix_p=1.0,
        char_dim=20,
        feat_dim=4,
        hidden_dim=28,
        max_epochs=2,
        patience=2,
        seed=7,
    )
    return train(samples[:100], samples[100:], cfg, log_stream=io.StringIO())


@pytest.fixture(scope="session")
def tiny_checkpoint(tiny_result, tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "tiny.bin"
    save_checkpoint(str(path), tiny_result.model, tiny_result.config)
    return str(path)


@pytest.fixture
def write_pairs(tmp_path):
    """Write (source, target) rows as a pairs-format file; returns the path."""

    def _write(rows, name="data.tsv"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write("\t".join(row) + "\n")
        return str(path)

    return _write
