"""Smoke test of the flowmc Python extension.

Build and install it first:
    pip install -e crates/py --no-build-isolation
then run:
    python3 python/smoke_test.py
"""

import flowmc


def main():
    sf = flowmc.bench_sf(3, seed=1)
    verdict, report = flowmc.check(sf)
    assert verdict == "verified", (verdict, report)

    rp = flowmc.bench_rp(1, 1, "U")
    verdict, report = flowmc.check(rp, engine="bmc", bound=30)
    assert verdict == "counterexample", verdict
    assert "oracle confirmed: true" in report, report

    net, ltl = flowmc.transform(sf)
    assert ".place act@o init" in net
    assert ltl is not None
    places = sum(1 for line in net.splitlines() if line.startswith(".place"))
    assert (places, None) == (flowmc.reduced_sizes(sf, 1)[0], None)

    header = flowmc.aiger(sf).splitlines()[0].split()
    assert header[0] == "aag" and int(header[3]) == places + 2, header

    assert flowmc.normalize_formula("A F  p3") == "A F p3"

    topology = "switches = {a, b}; connections = {a - b};"
    config = "ingress = {a}; a.fwd(b); egress = {b};"
    inst = flowmc.encode_sdn(topology, config)
    assert flowmc.check(inst)[0] == "verified"

    for bad in [lambda: flowmc.check(".place a\n.bogus\n", "A F a"),
                lambda: flowmc.bench_rp(1, 1, "Z"),
                lambda: flowmc.check(sf, engine="sat")]:
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
