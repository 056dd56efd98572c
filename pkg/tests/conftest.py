import numpy as np
import pytest

from quokka.circuit import Gate, GateKind, RawCircuit

# Worked 10-qubit example: raw listing and its optimized form for
# chunk=4 qubits, 8 local qubits, 2 rank qubits, swaps on, fusion off.
EXAMPLE_RAW = """\
H 0 0
H 1 1
RZZ 2 4 2
RZZ 5 7 3
H 8 4
H 9 5
H 3 6
H 6 7
RZZ 0 2 8
RZZ 4 7 9
H 9 10
RZZ 1 8 11
RZZ 3 6 12
H 5 13
"""

EXAMPLE_OPTIMIZED = """\
3
H 0 0
H 1 1
H 3 6
1
SQS 3 0 1 3 4 5 7
4
RZZ 0 2 2
RZZ 1 3 3
RZZ 0 3 9
H 1 13
1
SQS 3 0 1 3 4 6 7
3
H 1 7
RZZ 1 3 12
RZZ 0 2 8
1
SQS 2 0 2 6 7
1
CSQS 2 6 7 8 9
1
SQS 2 0 2 6 7
1
SQS 1 3 5
4
H 2 5
H 2 10
H 0 4
RZZ 0 3 11
"""

TWO_QUBIT_KINDS = (GateKind.CX, GateKind.CP, GateKind.SWAP, GateKind.RZZ)
PARAM_COUNT = {GateKind.CP: 1, GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1,
               GateKind.RZZ: 1, GateKind.U: 3}
BENCH_KINDS = (GateKind.H, GateKind.X, GateKind.U, GateKind.CX, GateKind.CP,
               GateKind.SWAP, GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.RZZ)


def random_circuit(n: int, m: int, rng: np.random.Generator) -> RawCircuit:
    gates = []
    for i in range(m):
        kind = BENCH_KINDS[rng.integers(0, len(BENCH_KINDS))]
        arity = 2 if kind in TWO_QUBIT_KINDS else 1
        targets = tuple(int(x) for x in rng.choice(n, size=arity, replace=False))
        params = tuple(float(a) for a in rng.uniform(0, 2 * np.pi, PARAM_COUNT.get(kind, 0)))
        gates.append(Gate(kind, targets, i, params))
    return RawCircuit(n, tuple(gates))


@pytest.fixture
def example_raw():
    from quokka.circuit import parse_raw
    return parse_raw(EXAMPLE_RAW, 10)


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {verdict}: {name}", flush=True)
    elif report.when == "setup" and report.skipped:
        print(f"\nACCEPTANCE SKIP: {name}", flush=True)
