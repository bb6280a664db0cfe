#!/usr/bin/env python3
"""Count-search oracle and generator for the bundled 400-case eval fixture.

Searches exhaustively over integer confusion counts (tp, fp, tn, fn)
summing to 400 cases x 4 questions = 1600 scored pairs for a matrix that
reproduces the reference benchmark row

    accuracy 0.79, TPR 0.70, FPR 0.22, precision 0.91   (+/- 0.005 each)

The full four-target search provably comes up empty: accuracy is a convex
combination of TPR and 1 - FPR over the same pairs, so it can never exceed
max(0.705, 0.785) while TPR and FPR sit in their windows. The three rate
targets (TPR, FPR, precision) are jointly satisfiable; this script picks
the count vector minimizing the worst deviation from those three and
freezes it into labels.jsonl / verdicts.jsonl.
"""

import hashlib
import json
import math
import os
import random

TOTAL = 1600
CASES = 400
TARGETS = {"accuracy": 0.79, "tpr": 0.70, "fpr": 0.22, "precision": 0.91}
TOL = 0.005

OUT_DIR = os.path.join(
    os.path.dirname(__file__), "..", "crates", "lastmile", "fixtures", "eval_cases"
)


def metrics(tp, fp, tn, fn):
    total = tp + fp + tn + fn
    acc = (tp + tn) / total
    tpr = tp / (tp + fn) if tp + fn else None
    fpr = fp / (fp + tn) if fp + tn else None
    prec = tp / (tp + fp) if tp + fp else None
    return acc, tpr, fpr, prec


def search():
    best_three = None  # (max deviation over tpr/fpr/prec, counts)
    four_target_hits = []
    for positives in range(1, TOTAL):
        negatives = TOTAL - positives
        tp_lo = math.ceil((TARGETS["tpr"] - TOL) * positives)
        tp_hi = math.floor((TARGETS["tpr"] + TOL) * positives)
        fp_lo = math.ceil((TARGETS["fpr"] - TOL) * negatives)
        fp_hi = math.floor((TARGETS["fpr"] + TOL) * negatives)
        for tp in range(max(tp_lo, 0), min(tp_hi, positives) + 1):
            fn = positives - tp
            for fp in range(max(fp_lo, 0), min(fp_hi, negatives) + 1):
                tn = negatives - fp
                acc, tpr, fpr, prec = metrics(tp, fp, tn, fn)
                if prec is None or abs(prec - TARGETS["precision"]) > TOL:
                    continue
                dev3 = max(
                    abs(tpr - TARGETS["tpr"]),
                    abs(fpr - TARGETS["fpr"]),
                    abs(prec - TARGETS["precision"]),
                )
                if best_three is None or dev3 < best_three[0]:
                    best_three = (dev3, (tp, fp, tn, fn))
                if abs(acc - TARGETS["accuracy"]) <= TOL:
                    four_target_hits.append((tp, fp, tn, fn))
    return best_three, four_target_hits


def write_fixture(tp, fp, tn, fn):
    outcomes = ["tp"] * tp + ["fn"] * fn + ["fp"] * fp + ["tn"] * tn
    random.Random(424242).shuffle(outcomes)

    os.makedirs(OUT_DIR, exist_ok=True)
    labels_path = os.path.join(OUT_DIR, "labels.jsonl")
    verdicts_path = os.path.join(OUT_DIR, "verdicts.jsonl")
    with open(labels_path, "w") as lf, open(verdicts_path, "w") as vf:
        for case in range(CASES):
            leg_id = f"case_{case:04d}"
            label = {"leg_id": leg_id}
            verdict = {"leg_id": leg_id}
            evidence = {}
            for q in range(4):
                outcome = outcomes[case * 4 + q]
                truth = outcome in ("tp", "fn")
                predicted = outcome in ("tp", "fp")
                label[f"q{q + 1}"] = truth
                verdict[f"q{q + 1}"] = predicted
                evidence[f"q{q + 1}"] = [f"synthetic/q{q + 1}"] if truth else []
            label["evidence"] = evidence
            verdict["source"] = "direct-parse"
            verdict["raw_digest"] = hashlib.sha256(leg_id.encode()).hexdigest()
            lf.write(json.dumps(label, sort_keys=True) + "\n")
            vf.write(json.dumps(verdict, sort_keys=True) + "\n")


def main():
    best_three, four_hits = search()
    print(f"four-target solutions within +/-{TOL}: {len(four_hits)}")
    if four_hits:
        print("  e.g.", four_hits[0])
    dev3, (tp, fp, tn, fn) = best_three
    acc, tpr, fpr, prec = metrics(tp, fp, tn, fn)
    print(f"best three-rate counts: tp={tp} fp={fp} tn={tn} fn={fn} (max dev {dev3:.6f})")
    print(f"  accuracy={acc:.6f} tpr={tpr:.6f} fpr={fpr:.6f} precision={prec:.6f}")
    write_fixture(tp, fp, tn, fn)
    print(f"wrote {CASES}-case fixture to {os.path.relpath(OUT_DIR)}")


if __name__ == "__main__":
    main()
