import json
import math
import os
import pathlib

import pytest

import svaport

CORPUS = pathlib.Path(os.environ.get("SVAPORT_CORPUS_DIR", pathlib.Path(__file__).resolve().parents[2] / "corpus"))


def read(rel):
    return (CORPUS / rel).read_text()


def test_metrics():
    assert svaport.analytic_probability(3) == (1, 3)
    assert math.isclose(svaport.tpi(0.125), 0.90309, abs_tol=1e-5)
    assert svaport.tder(3, 4) == 75.0
    with pytest.raises(svaport.DomainError):
        svaport.tpi(0.0)


def test_interrupt_classification():
    d = svaport.Design(read("golden/irq_handle.sv"))
    rel = d.classify("handle_irq", "csr_mstatus_mie_i")
    assert rel == {"kind": "indirect", "depth": 2,
                   "path": ["handle_irq", "irq_enabled", "csr_mstatus_mie_i"]}
    assert len(d.fanin("handle_irq")) == 8
    with pytest.raises(svaport.UnknownSignalError):
        d.fanin("nope")


def test_translate_csr_assertion():
    source = svaport.Assertion(read("golden/ns31a_csr.sva"))
    target = svaport.Design(read("csr/ibex_cs_registers.sv"))
    out = svaport.translate(source, target, read("csr/csr_map.json"))
    assert out["translatable"]
    assert out["links"]["rst"]["status"] == "dropped"
    golden = svaport.Assertion(read("golden/ibex_csr_expected.sva"))
    assert out["assertion"] == golden


def test_simulate_and_check():
    d = svaport.Design(read("debug/ibex_debug.sv"))
    cycles = [{}, {"debug_req_i": 1}, {}, {"dret_insn_i": 1}]
    trace = d.simulate(cycles, reset_cycles=1)
    assert trace["debug_mode_o"] == [0, 0, 1, 1]
    a = svaport.Assertion("p: assert property (@(posedge clk_i) debug_req_i && !debug_mode_o |-> debug_cause_haltreq_o);")
    verdict = d.check(a, cycles, reset_cycles=1)
    assert verdict["failures"] == 0 and verdict["passes"] == 1


def test_syntax_error():
    with pytest.raises(svaport.SyntaxError):
        svaport.Assertion("p: assert property (@(posedge clk) a |-> );")


def test_pipeline(tmp_path):
    cfg = str(CORPUS / "project.json")
    out = str(tmp_path / "out")
    for stage in ("translate", "inject", "evaluate"):
        code, _, err = svaport.run(cfg, stage, out=out, jobs=2)
        assert code == 0, err
    report = json.loads((tmp_path / "out" / "report" / "metrics.json").read_text())
    assert [m["detection_pct"] for m in report["modules"]] == [100.0] * 5
    code, text, _ = svaport.run(cfg, "report", out=out, format="csv")
    assert code == 0 and "HW-T33" in text
