#!/usr/bin/env python3
"""Regenerates the scripted demo and benchmark fixtures under data/.

Candidate sources are synthetic; the mock simulator looks their outputs up by
SHA-256, so the simulated traces here are computed from Python models of each
behaviour.
"""
import hashlib
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
PREFIX = "VRANK"


def hexw(value, width):
    digits = (width + 3) // 4
    return format(value & ((1 << width) - 1), "0{}x".format(digits))


class Problem:
    def __init__(self, pid, spec, inputs, outputs, cases):
        self.pid = pid
        self.spec = spec
        self.inputs = inputs    # [(name, width)]
        self.outputs = outputs  # [(name, width)]
        self.cases = cases      # [dict of input values]

    @property
    def interface(self):
        ports = ["input [{}:0] {}".format(w - 1, n) if w > 1 else "input {}".format(n) for n, w in self.inputs]
        ports += ["output [{}:0] {}".format(w - 1, n) if w > 1 else "output {}".format(n) for n, w in self.outputs]
        return "module top_module(\n  " + ",\n  ".join(ports) + "\n);"

    def stimulus(self, case):
        return " ".join("{} = {}'h{};".format(n, w, hexw(case[n], w)) for n, w in self.inputs)

    def test_case_response(self):
        body = "\n".join("// CASE: case {}\n{}".format(i, self.stimulus(c)) for i, c in enumerate(self.cases))
        return "Here are the test cases.\n```verilog\n" + body + "\n```\n"

    def records(self, fn):
        lines = []
        for i, case in enumerate(self.cases):
            out = fn(case)
            fields = ["{}={}".format(n, hexw(case[n], w)) for n, w in self.inputs]
            fields += ["{}={}".format(n, hexw(out[n], w)) for n, w in self.outputs]
            lines.append("{} {} {}".format(PREFIX, i, " ".join(fields)))
        return lines

    def reference_testbench(self):
        return ("`timescale 1ns/1ps\nmodule tb;\n  // compares top_module against a reference model\n"
                "  initial begin\n    $display(\"Mismatches: %0d in %0d samples\", 0, 20);\n    $finish;\n"
                "  end\nendmodule\n")


def candidate_source(problem, body, variant):
    return "{}\n  // variant {}\n{}\nendmodule\n".format(problem.interface, variant, body)


def fenced(source):
    return "```verilog\n" + source + "```\n"


def build(problem, groups, cot_backs_challenger):
    """groups: [(count, body, fn, correct)] in candidate order."""
    table, candidates, traces = {}, [], []
    for g, (count, body, fn, correct) in enumerate(groups):
        stdout = "\n".join(problem.records(fn)) + "\n"
        for k in range(count):
            src = candidate_source(problem, body, "{}.{}".format(g, k))
            candidates.append(src)
            traces.append(problem.records(fn))
            table[hashlib.sha256(src.encode()).hexdigest()] = {"stdout": stdout, "correct": correct}

    # The two largest groups are the arbitration pair.
    order = sorted(range(len(groups)), key=lambda g: -groups[g][0])
    top, second = problem.records(groups[order[0]][2]), problem.records(groups[order[1]][2])
    case = next(i for i in range(len(top)) if top[i] != second[i])
    fields = lambda rec: dict(tok.split("=", 1) for tok in rec.split()[2:])
    back = fields(second[case]) if cot_backs_challenger else fields(top[case])
    summary = json.dumps({n: back[n] for n, _ in problem.outputs})

    x = 5
    script = {
        "candidate": [fenced(c) for c in candidates],
        "test_cases": [problem.test_case_response()],
        "reasoning": ["Tracing the specification for case {} step by step.".format(case)] * x,
        "summary": [summary] * x,
    }
    return table, script, candidates


def write_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


ADDER = Problem(
    "adder4", "Implement a 4-bit adder: sum is the 5-bit sum of a and b.",
    [("a", 4), ("b", 4)], [("sum", 5)],
    [{"a": 1, "b": 2}, {"a": 15, "b": 1}, {"a": 7, "b": 9}, {"a": 12, "b": 12}, {"a": 0, "b": 0}])
MUX = Problem(
    "mux2", "Implement an 8-bit 2-to-1 multiplexer: out = sel ? b : a.",
    [("a", 8), ("b", 8), ("sel", 1)], [("out", 8)],
    [{"a": 0x12, "b": 0x34, "sel": 0}, {"a": 0x12, "b": 0x34, "sel": 1}, {"a": 0xff, "b": 0x00, "sel": 1},
     {"a": 0x0f, "b": 0xf0, "sel": 0}, {"a": 0xa5, "b": 0x5a, "sel": 1}])
ANDOR = Problem(
    "and_or", "Compute y = (a & b) | c bitwise on 4-bit vectors.",
    [("a", 4), ("b", 4), ("c", 4)], [("y", 4)],
    [{"a": 0xf, "b": 0x3, "c": 0x0}, {"a": 0x5, "b": 0xa, "c": 0x1}, {"a": 0x6, "b": 0x6, "c": 0x8},
     {"a": 0x0, "b": 0xf, "c": 0x0}, {"a": 0x9, "b": 0xc, "c": 0x2}])
POPCOUNT = Problem(
    "popcount4", "out is the number of set bits in the 4-bit input in.",
    [("in", 4)], [("out", 3)],
    [{"in": 0x0}, {"in": 0x1}, {"in": 0x3}, {"in": 0x7}, {"in": 0xf}, {"in": 0xa}])
MAX = Problem(
    "max8", "out is the larger of the unsigned 8-bit inputs a and b.",
    [("a", 8), ("b", 8)], [("out", 8)],
    [{"a": 3, "b": 9}, {"a": 200, "b": 100}, {"a": 7, "b": 7}, {"a": 0, "b": 255}, {"a": 128, "b": 127}])

pop = lambda v: bin(v).count("1")

BENCH = [
    (ADDER, [
        (6, "  assign sum = a + b;", lambda c: {"sum": c["a"] + c["b"]}, True),
        (3, "  assign sum = a ^ b;", lambda c: {"sum": c["a"] ^ c["b"]}, False),
        (1, "  assign sum = a + b + 1;", lambda c: {"sum": c["a"] + c["b"] + 1}, False)], False),
    (MUX, [
        (6, "  assign out = sel ? b : a;", lambda c: {"out": c["b"] if c["sel"] else c["a"]}, True),
        (3, "  assign out = sel ? a : b;", lambda c: {"out": c["a"] if c["sel"] else c["b"]}, False),
        (1, "  assign out = a & b;", lambda c: {"out": c["a"] & c["b"]}, False)], False),
    (ANDOR, [
        (6, "  assign y = (a & b) | c;", lambda c: {"y": (c["a"] & c["b"]) | c["c"]}, True),
        (3, "  assign y = a & (b | c);", lambda c: {"y": c["a"] & (c["b"] | c["c"])}, False),
        (1, "  assign y = a | b | c;", lambda c: {"y": c["a"] | c["b"] | c["c"]}, False)], False),
    (POPCOUNT, [
        (6, "  assign out = in[0] + in[1] + in[2] + in[3];", lambda c: {"out": pop(c["in"])}, True),
        (3, "  assign out = in[0] + in[1];", lambda c: {"out": pop(c["in"] & 3)}, False),
        (1, "  assign out = in[3:1];", lambda c: {"out": c["in"] >> 1}, False)], False),
    (MAX, [
        (5, "  assign out = (a > b) ? b : a;", lambda c: {"out": min(c["a"], c["b"])}, False),
        (3, "  assign out = (a > b) ? a : b;", lambda c: {"out": max(c["a"], c["b"])}, True),
        (1, "  assign out = a;", lambda c: {"out": c["a"]}, False),
        (1, "  assign out = b;", lambda c: {"out": c["b"]}, False)], True),
]


def main():
    bench_dir = HERE / "bench"
    table, manifest = {}, []
    for problem, groups, backs in BENCH:
        t, script, _ = build(problem, groups, backs)
        table.update(t)
        write_json(bench_dir / "scripts" / (problem.pid + ".json"), script)
        manifest.append({"id": problem.pid, "spec_text": problem.spec, "module_interface": problem.interface,
                         "reference_testbench": problem.reference_testbench()})
    write_json(bench_dir / "sim_table.json", table)
    (bench_dir / "manifest.jsonl").write_text("".join(json.dumps(p, sort_keys=True) + "\n" for p in manifest))

    demo = Problem("demo_adder", ADDER.spec, ADDER.inputs, ADDER.outputs, ADDER.cases[:4])
    groups = [
        (5, "  assign sum = a + b;", lambda c: {"sum": c["a"] + c["b"]}, True),
        (3, "  assign sum = a ^ b;", lambda c: {"sum": c["a"] ^ c["b"]}, False),
        (2, "  assign sum = {1'b0, a | b};", lambda c: {"sum": c["a"] | c["b"]}, False)]
    # interleave so cluster membership does not follow candidate order
    order = [0, 1, 0, 2, 1, 0, 0, 2, 1, 0]
    table, script, candidates = build(demo, groups, False)
    by_group = {g: [c for c in candidates if "// variant {}.".format(g) in c] for g in range(3)}
    script["candidate"] = [fenced(by_group[g].pop(0)) for g in order]
    # two of five attempts back the challenger: below the 80% threshold
    challenger_summary = build(demo, groups, True)[1]["summary"][0]
    script["summary"][0] = challenger_summary
    script["summary"][1] = challenger_summary
    demo_dir = HERE / "demo"
    write_json(demo_dir / "sim_table.json", table)
    write_json(demo_dir / "mock_script.json", script)
    write_json(demo_dir / "problem.json", {"id": demo.pid, "spec_text": demo.spec,
                                           "module_interface": demo.interface,
                                           "reference_testbench": demo.reference_testbench()})


if __name__ == "__main__":
    main()
