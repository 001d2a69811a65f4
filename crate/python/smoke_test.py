"""Smoke test for the Python bindings.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o target/wheels
    pip install --force-reinstall target/wheels/coxeter_subgroups-*.whl

then run ``python python/smoke_test.py`` (or ``pytest python/``).
"""

import json

import coxeter_subgroups_py as cs


def test_classify():
    assert cs.classify("1 2 3; 2 3 3; 3 1 3") == ["tA2"]
    assert cs.classify("1 2 3; 2 3 4; 3 4 3; 4 5 3") == ["tF4"]
    assert cs.classify("1 2 5") == ["?"]


def test_self_similar():
    for host, index in [("tC2", 2), ("tG2", 3), ("tF4", 4)]:
        rec = cs.exceptional_subgroup(host)
        assert json.loads(rec)["payload"]["index"] == index
        assert cs.subgroup_index(host, rec) == index
    rec = cs.exceptional_subgroup("tG2")
    assert cs.tiling_index("tG2", rec) == 3


def test_homothety():
    rec = cs.homothety_subgroup("tA2", 3)
    assert cs.subgroup_index("tA2", rec) == 9 == cs.tiling_index("tA2", rec)


def test_enumerate():
    recs = json.loads(cs.enumerate_subgroups("tG2", 6))
    assert {r["payload"]["index"] for r in recs} >= {1, 2, 3, 4, 6}
    c2 = json.loads(cs.enumerate_subgroups("tC2", 8))
    fig = [json.dumps(r) for r in c2 if r["payload"]["label"] == "2tA1" and r["payload"]["index"] == 8]
    assert len(fig) >= 3
    assert not cs.are_equivalent(fig[0], fig[1])
    f4 = json.loads(cs.enumerate_finite("F4", True))
    assert any(r["payload"]["label"] == "B2+B2" for r in f4)


def test_verify_and_errors():
    report = json.loads(cs.verify_table(2))
    assert report["schema_version"] == cs.SCHEMA_VERSION == 1
    assert all(c["status"] == "PASS" for c in report["payload"]["checks"])
    for bad in [lambda: cs.classify("1 x 3"), lambda: cs.enumerate_subgroups("G2", 3)]:
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
