"""Smoke test for the pygradeforest extension module.

Build and install first:
    pip install --no-build-isolation ./crates/python
then run:
    python python/smoke_test.py
"""

import os
import tempfile

import pygradeforest as gf


def main():
    with tempfile.TemporaryDirectory() as tmp:
        records = os.path.join(tmp, "records.csv")
        truth = os.path.join(tmp, "truth.csv")
        n = gf.synthesize("default", 600, 7, records, truth)
        assert n > 0 and os.path.getsize(truth) > 0

        cohort = gf.ingest(records)
        data = cohort.completion
        assert data.class_names == ["completed", "dropout"]
        assert sum(cohort.audit.values()) == 600
        assert cohort.rejects == []
        print(data, cohort.audit)

        parts = gf.split(data, seed=7)
        assert sorted(parts["train"] + parts["validation"] + parts["test"]) == list(range(len(data)))

        forest = gf.Model.fit_forest(data, seed=7, rows=parts["train"], preset_name="rf3", n_trees=50)
        report = gf.evaluate(forest, data, parts["test"])
        assert 0.0 <= report["accuracy"] <= 1.0
        assert sum(forest.votes(data.row(0))) == 50
        print("rf3 accuracy", round(report["accuracy"], 4))

        again = gf.Model.from_text(forest.to_text())
        assert again.predict_rows(data, parts["test"]) == forest.predict_rows(data, parts["test"])

        logit = gf.Model.fit_logistic(data, rows=parts["train"])
        p = logit.predict_proba(data.row(0))
        assert abs(sum(p) - 1.0) < 1e-12
        print("logistic accuracy", round(gf.evaluate(logit, data, parts["test"])["accuracy"], 4))

        dummy = gf.evaluate_dummy(data, "majority", seed=7, fit_rows=parts["train"], rows=parts["test"])
        print("majority accuracy", round(dummy["accuracy"], 4))

        imp = gf.permutation_importance(forest, data, seed=7, rows=parts["test"])
        assert len(imp.mean) == data.n_features == len(imp.standard_errors())
        top = imp.top_k(5)
        assert len(top) == 5
        assert imp.boxplot_svg(5).startswith("<svg")
        print("top predictors", [name for name, _ in top])

        major = cohort.major
        if len(major.class_names) > 2:
            try:
                gf.Model.fit_logistic(major)
            except gf.GradeForestError as e:
                assert e.exit_code == 4
            else:
                raise AssertionError("binary model on a multi-class task must fail")

        try:
            gf.Model.fit_forest(data, seed=1, preset_name="rf9")
        except gf.GradeForestError as e:
            assert e.exit_code == 2
        else:
            raise AssertionError("unknown preset must fail")

    print("smoke test passed")


if __name__ == "__main__":
    main()
