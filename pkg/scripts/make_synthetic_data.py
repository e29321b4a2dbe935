"""Regenerate data/shifts.csv and data/measurements.csv.

Both files are synthetic: frequency shifts for two measurement sets are
generated from the room-temperature theory of the default configuration
with PLL noise, then calibrated, extracted and averaged exactly as
``gcasimir calibrate`` does. The seed is fixed so the files are
reproducible.
"""
import os

import numpy as np

from gcasimir import analysis, calibration
from gcasimir.config import RunConfig

SEED = 20210294
HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")


def main():
    cfg = RunConfig.load(os.path.join(HERE, "..", "configs", "default.conf"))
    plate = cfg.boundary("plate")
    theory = analysis.theory_table(np.arange(240.0, 721.0, 10.0), plate.sheet, cfg.temperature,
                                   radius=cfg.radius, budget=cfg.budget(), policy=cfg.policy(),
                                   rough=cfg.roughness(), substrate=plate.substrate,
                                   sphere=cfg.sphere())
    rng = np.random.default_rng(SEED)
    records = []
    for sid, (v0, z0, c) in enumerate(analysis.MEASURED_SETS, start=1):
        z = np.arange(np.floor(250.0 - z0 - 4.0), np.ceil(700.0 - z0 + 4.0) + 1.0)
        records += calibration.synthetic_records(z, cfg.radius, v0, z0, c,
                                                 casimir=lambda x: float(theory.value(x)),
                                                 noise=calibration.PLL_RESOLUTION, rng=rng,
                                                 set_id=sid)
    os.makedirs(DATA, exist_ok=True)
    calibration.write_shifts(os.path.join(DATA, "shifts.csv"), records)

    sets = calibration.read_shifts(os.path.join(DATA, "shifts.csv"))
    extracted = [calibration.extract_casimir(r, calibration.fit_calibration(r, cfg.radius))
                 for r in sets.values()]
    avg = calibration.average_sets(extracted, np.arange(250.0, 701.0, 1.0))
    analysis.MeasurementSeries([analysis.MeasurementPoint(p.a, p.gradient, p.err_gradient, p.err_a)
                                for p in avg]).to_csv(os.path.join(DATA, "measurements.csv"))


if __name__ == "__main__":
    main()
