"""Runner coverage for the remaining config surfaces: cyclic groups,
tabulated lengths, operator systems, trivial actions."""

import json
import textwrap

import numpy as np
import pytest

import crossedqm.runner as runner


CYCLIC_SCENARIO = textwrap.dedent("""\
    name = "cyclic_smoke"
    seed = 3

    [group]
    family = "cyclic"
    order = 7

    [length]
    kind = "word"

    [base]
    kind = "matrix_inner"
    k = 2
    dirac = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]

    [action]
    kind = "inner"
    unitaries = [
        [[[%(re)s, %(im)s], [0.0, 0.0]], [[0.0, 0.0], [%(re)s, -%(im)s]]],
    ]

    [operator_system]
    basis = [
        [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
    ]
    action_invariant = true

    [sampler]
    count = 4
    support_radius = 2
    terms = 2

    [checks]
    run = ["berezin-contraction", "approximation-identity", "kernel-audit",
           "mk-distance"]

    [params]
    radii = [1, 2, 3]
    berezin_set_radius = 1
    mk_support_radius = 2
    mk_budget = 300
    cqms_budget = 200
""") % {"re": np.cos(2 * np.pi / 7), "im": np.sin(2 * np.pi / 7)}


def test_cyclic_scenario_runs(tmp_path):
    cfg_path = tmp_path / "cyclic.toml"
    cfg_path.write_text(CYCLIC_SCENARIO)
    code = runner.run_file(cfg_path, out=tmp_path / "out")
    assert code == runner.EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["pass"] and len(summary["checks"]) == 4


def test_invalid_operator_system_rejected(tmp_path):
    # a basis without the unit in its span fails validation before any check
    unit_row = "[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],"
    assert unit_row in CYCLIC_SCENARIO
    text = CYCLIC_SCENARIO.replace(unit_row, "")
    cfg_path = tmp_path / "bad_system.toml"
    cfg_path.write_text(text)
    assert runner.run_file(cfg_path, out=tmp_path / "out") == runner.EXIT_INVALID_CONFIG


def test_tabulated_length_scenario(tmp_path):
    table = {"0": [[0.0, 0.0]], "1": [[1.0, 0.0]], "2": [[1.5, 0.0]],
             "5": [[1.5, 0.0]], "6": [[1.0, 0.0]]}
    (tmp_path / "len.json").write_text(json.dumps(table))
    cfg = textwrap.dedent("""\
        name = "tabulated_smoke"
        seed = 1

        [group]
        family = "cyclic"
        order = 7

        [length]
        kind = "tabulated"
        table = "len.json"

        [base]
        kind = "scalar"

        [action]
        kind = "trivial"

        [sampler]
        count = 3
        support_radius = 2
        terms = 2

        [checks]
        run = ["berezin-contraction", "kernel-audit"]

        [params]
        radii = [1, 2]
        berezin_set_radius = 1
    """)
    cfg_path = tmp_path / "tab.toml"
    cfg_path.write_text(cfg)
    code = runner.run_file(cfg_path, out=tmp_path / "out")
    assert code == runner.EXIT_OK


def test_trivial_action_scalar_base(tmp_path):
    cfg = textwrap.dedent("""\
        name = "scalar_smoke"
        seed = 2

        [group]
        family = "z^d"
        rank = 1

        [length]
        kind = "word"

        [base]
        kind = "scalar"

        [action]
        kind = "trivial"

        [checks]
        run = ["folner-convergence", "mk-distance", "tensor-sum-sandwich"]

        [params]
        radii = [2, 3, 4]
        folner_r = 3
        folner_n = [1, 2, 3, 4, 5, 6, 7, 8]
        mk_support_radius = 2
        mk_budget = 300

        [output]
        plots = false
    """)
    cfg_path = tmp_path / "scalar.toml"
    cfg_path.write_text(cfg)
    code = runner.run_file(cfg_path, out=tmp_path / "out")
    assert code == runner.EXIT_OK
    # plots disabled: no SVG files
    assert not list((tmp_path / "out").glob("*.svg"))
