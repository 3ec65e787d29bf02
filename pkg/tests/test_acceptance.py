"""End-to-end acceptance checks.

Each test records one PASS/FAIL line (printed immediately and repeated in the
terminal summary).  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import json
import time

import numpy as np
import pytest

from conftest import OMEGA_S_EFF, PUMP_RATIO, T_AD_GRID, make_schedule, make_system, record_criterion
from factortime.cli import main
from factortime.scaling import PhysicalParams, cavity_estimate, cz_estimate, raman_estimate
from factortime.stirap import simulate_transfer

TABLE = PhysicalParams(eta=0.1, rho=1e7, epsilon=1000.0, beta=100.0, alpha=1.0)


def rel(a, b):
    return abs(a - b) / abs(b)


def check(label, results):
    """``results`` is a list of ``(description, ok)``; record and assert them together."""
    passed = all(ok for _, ok in results)
    record_criterion(label, passed, "; ".join(d for d, _ in results))
    assert passed, results


def test_cz_table():
    e2, e4 = cz_estimate(2, TABLE), cz_estimate(4, TABLE)
    targets = [
        ("t_min(2)", e2.t_min, 1.011),
        ("t_min(4)", e4.t_min, 258.8),
        ("gamma_max(2)", e2.gamma_max, 9.895e-2),
        ("gamma_max(4)", e4.gamma_max, 1.933e-4),
    ]
    results = [(f"{n}={v:.6g} (target {t:g})", rel(v, t) <= 1e-3) for n, v, t in targets]
    # rounded values quoted in the table
    results += [
        (f"rounds to 1 s / 259 s: {round(e2.t_min)} / {round(e4.t_min)}", round(e2.t_min) == 1 and round(e4.t_min) == 259),
        ("gamma_max(4) ~ 1.9e-4", f"{e4.gamma_max:.1e}" == "1.9e-04"),
    ]
    check("1 CZ table", results)


def test_scaling_ratios():
    t4 = cz_estimate(4, TABLE).t_min
    r40 = cz_estimate(40, TABLE).t_min / t4
    r400 = cz_estimate(400, TABLE).t_min / t4
    check("2 scaling ratios", [
        (f"t(40)/t(4)={r40:.12g}", rel(r40, 1e8) <= 1e-9),
        (f"t(400)/t(4)={r400:.12g}", rel(r400, 1e16) <= 1e-9),
    ])


def test_raman_table():
    t2, t4 = raman_estimate(2, TABLE).t_min, raman_estimate(4, TABLE).t_min
    quoted = {2: 0.05, 4: 6.5}
    check("3 Raman table", [
        (f"t_min(2)={t2!r}", rel(t2, 6.4e-2) <= 1e-12),
        (f"t_min(4)={t4!r}", rel(t4, 8.192) <= 1e-12),
        (f"quoted 0.05 off by {rel(quoted[2], t2):.1%}", rel(quoted[2], t2) <= 0.35),
        (f"quoted 6.5 off by {rel(quoted[4], t4):.1%}", rel(quoted[4], t4) <= 0.35),
    ])


def test_bound_saturation():
    worst = 0.0
    for L in range(1, 65):
        gmax = cz_estimate(L, TABLE).gamma_max
        at_bound = cz_estimate(L, PhysicalParams(eta=0.1, rho=1e7, epsilon=1000.0, gamma=gmax))
        t_min = at_bound.t_min
        worst = max(worst, rel(at_bound.run_time, t_min), rel(at_bound.tau_dec, t_min))
    check("4 bound saturation", [(f"max rel deviation over L=1..64: {worst:.2e}", worst <= 1e-9)])


def test_adiabatic_limit():
    tol = 1e-8
    t_ad = 1e-2
    area = OMEGA_S_EFF * t_ad
    start = time.perf_counter()
    res = simulate_transfer(make_system(0.0), make_schedule(t_ad, pump_ratio=10.0), tol=tol)
    elapsed = time.perf_counter() - start
    check("5 adiabatic limit", [
        (f"pulse area {area:g}", area >= 500),
        (f"fidelity {res.transfer_fidelity:.6f}", res.transfer_fidelity >= 0.999),
        (f"norm drift {res.norm_drift:.1e}", res.norm_drift <= 10 * tol),
        (f"runtime {elapsed:.2f} s", elapsed < 10),
    ])


def test_beta_law(beta_fits):
    ref, doubled = beta_fits[PUMP_RATIO], beta_fits[2 * PUMP_RATIO]
    growth = doubled.beta / ref.beta
    decade = T_AD_GRID[-1] / T_AD_GRID[0]
    check("6 1/T law and beta", [
        (f"T_ad span x{decade:g}", decade >= 10 * (1 - 1e-12)),
        (f"max p_em {max(ref.p_em):.3g}", max(ref.p_em) < 0.05 and max(doubled.p_em) < 0.05),
        (f"slope {ref.slope:.4f}", abs(ref.slope + 1) <= 0.1),
        (f"beta {ref.beta:.1f}", 30 <= ref.beta <= 300),
        (f"beta growth under pump doubling x{growth:.3f}", growth <= 2),
    ])


def test_exponent_recovery():
    bits = np.array([2, 4, 8, 16, 32])
    results = []
    for name, fn, expected in (("CZ", cz_estimate, 8), ("Raman", raman_estimate, 7), ("Cavity", cavity_estimate, 6)):
        t = np.array([fn(int(L), TABLE).t_min for L in bits])
        slope = np.polyfit(np.log(bits), np.log(t), 1)[0]
        results.append((f"{name} slope {slope:.12f}", abs(slope - expected) <= 1e-9))
    check("7 exponent recovery", results)


def _cli(argv, capsys):
    code = main([str(a) for a in argv])
    out, _ = capsys.readouterr()
    assert code == 0
    return out


def test_cli_determinism(tmp_path, capsys):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({
        "sweep": {
            "scenario": {"preset": "cz-paper"},
            "axis": "L",
            "grid": {"start": 1, "stop": 400, "count": 50, "scale": "log"},
        }
    }))
    results = []
    for fmt in ("csv", "json"):
        runs = [_cli(["sweep", cfg, "--format", fmt, "--workers", w], capsys) for w in (1, 1, 4)]
        results.append((f"sweep {fmt} identical over serial/serial/4 workers", len(set(runs)) == 1))
        files = []
        for i, w in enumerate((1, 4)):
            dest = tmp_path / f"out{i}.{fmt}"
            _cli(["sweep", cfg, "--format", fmt, "--workers", w, "-o", dest], capsys)
            files.append(dest.read_bytes())
        results.append((f"sweep {fmt} file bytes identical", files[0] == files[1] == runs[0].encode()))
    est = [_cli(["estimate", "--preset", "raman-paper", "--format", f], capsys) for f in ("csv", "json", "csv", "json")]
    results.append(("estimate csv/json repeatable", est[0] == est[2] and est[1] == est[3]))
    check("8 CLI determinism", results)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
