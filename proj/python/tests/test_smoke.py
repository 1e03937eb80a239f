import binascii
import random

import pytest

import odma_ura


def test_crc_matches_xmodem():
    msg = b"123456789"
    bits = [(byte >> (7 - i)) & 1 for byte in msg for i in range(8)]
    want = binascii.crc_hqx(msg, 0)
    got = odma_ura.crc(bits, 16)
    assert int("".join(map(str, got)), 2) == want


def test_polar_round_trip():
    rng = random.Random(3)
    msg = [rng.randint(0, 1) for _ in range(96)]
    cw = odma_ura.polar_encode(msg, 256, 112)
    assert len(cw) == 256
    llr = [-20.0 if b else 20.0 for b in cw]
    assert odma_ura.polar_decode(llr, 112) == msg


def test_frozen_set_size():
    assert len(odma_ura.frozen_set(256, 112)) == 144


def test_config_round_trip_and_errors():
    cfg = odma_ura.desk_profile(2.0)
    assert cfg["n"] == 2000 and cfg["K_a"] == 2.0
    assert odma_ura.validate(cfg) == cfg
    with pytest.raises(odma_ura.ConfigError):
        odma_ura.validate({**cfg, "B_p": 200})
    with pytest.raises(ValueError):
        odma_ura.validate({**cfg, "no_such_key": 1})


def test_noiseless_trial_and_determinism():
    cfg = {**odma_ura.desk_profile(2.0), "sigma2": 0.0}
    a = odma_ura.run_trial(cfg, 11, 0)
    assert a["pupe"] == 0.0
    b = odma_ura.run_trial(cfg, 11, 0)
    assert {k: v for k, v in a.items() if k != "runtime_ms"} == {k: v for k, v in b.items() if k != "runtime_ms"}


def test_sweep_and_search():
    cfg = odma_ura.desk_profile(2.0)
    pts = odma_ura.run_sweep(cfg, [8.0], 2)
    assert len(pts) == 1 and 0.0 <= pts[0]["pupe"] <= 1.0
    with pytest.raises(ValueError, match="no trials"):
        odma_ura.run_sweep(cfg, [8.0], 0)
    found, evaluated = odma_ura.find_min_eb_n0(cfg, 1.0, (3.0, 5.0, 1.0), 1)
    assert found == 3.0 and len(evaluated) == 1
    found, evaluated = odma_ura.find_min_eb_n0(cfg, 0.0, (3.0, 5.0, 1.0), 1)
    assert found is None and evaluated == []


def test_wilson():
    lo, hi = odma_ura.wilson_interval(0, 50)
    assert lo == 0.0 and 0.0 < hi < 0.1
