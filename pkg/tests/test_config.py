from __future__ import annotations

import pytest

from protoinv.config import SOLVER_ENV, EngineConfig, RunConfig, dump_config, load_config
from protoinv.errors import (
    EXIT_ERROR,
    EXIT_INTERRUPTED,
    BudgetExceeded,
    ConfigError,
    ErrorCategory,
    MappingError,
    ProtoinvError,
    exit_code_for,
)
from protoinv.resources import Budget


def test_defaults_need_no_file():
    config = load_config(environ={})

    assert config == RunConfig()
    assert config.solver.transport == "auto"
    assert config.output.dir == "runs"


def test_file_then_overrides_then_environment(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("engine:\n  max_seconds: 30\nconvergence:\n  max_size:\n    ballot: 6\n", encoding="utf-8")

    config = load_config(
        path,
        ["engine.symmetry=false", "convergence.max_size.value=3", "solver.path=/usr/bin/cvc5"],
        environ={SOLVER_ENV: "/opt/z3/bin/z3"},
    )

    assert config.engine.max_seconds == 30
    assert config.engine.symmetry is False
    assert config.convergence.max_size == {"ballot": 6, "value": 3}
    assert config.solver.path == "/opt/z3/bin/z3"


@pytest.mark.parametrize("override", ["engine.max_frames=0", "solver.transport=telnet", "max_frames", "=3"])
def test_bad_overrides_are_config_errors(override):
    with pytest.raises(ConfigError) as caught:
        load_config(overrides=[override], environ={})

    assert caught.value.category is ErrorCategory.INPUT


def test_config_file_must_be_a_mapping(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")

    with pytest.raises(ConfigError):
        load_config(path, environ={})


def test_dumped_config_loads_back(tmp_path):
    config = load_config(overrides=["engine.max_obligations=500", "output.minimize=false"], environ={})
    path = tmp_path / "dumped.yaml"
    path.write_text(dump_config(config), encoding="utf-8")

    assert load_config(path, environ={}) == config


def test_error_codes_map_to_categories_and_exit_codes():
    assert MappingError("x").category is ErrorCategory.INPUT
    assert ProtoinvError("x", code="trace_invalid").detail() == {
        "category": "input",
        "code": "trace_invalid",
        "message": "x",
    }
    assert ProtoinvError("x", code="solver_timeout").category is ErrorCategory.SOLVER
    assert ProtoinvError("x").category is ErrorCategory.INTERNAL
    assert exit_code_for(KeyboardInterrupt()) == EXIT_INTERRUPTED
    assert exit_code_for(MappingError("x")) == EXIT_ERROR


class FakeClock:
    def __init__(self) -> None:
        self.now = 100.0

    def __call__(self) -> float:
        return self.now


def test_budget_reports_the_exhausted_resource():
    clock = FakeClock()
    budget = Budget(EngineConfig(max_seconds=10, max_frames=5), clock=clock, memory=lambda: 0.0)

    budget.check(frames=5)
    assert budget.remaining_seconds() == 10

    with pytest.raises(BudgetExceeded) as frames:
        budget.check(frames=6)
    assert frames.value.resource == "frames"

    clock.now = 111.0
    assert budget.remaining_seconds() == 0.0
    with pytest.raises(BudgetExceeded) as elapsed:
        budget.check()
    assert elapsed.value.resource == "time"
    assert elapsed.value.category is ErrorCategory.BUDGET


def test_memory_budget_uses_the_probe():
    budget = Budget(EngineConfig(max_memory_mb=512), memory=lambda: 600.0)

    with pytest.raises(BudgetExceeded) as caught:
        budget.check()
    assert caught.value.resource == "memory"
