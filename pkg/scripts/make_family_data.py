"""Write the bundled affine family files (Dita construction with F2 and F3)."""

import json
from pathlib import Path

from hadamard_lab.catalogue import AffineFamilyData, dita_affine_data, fourier
from hadamard_lab.core import CHMatrix

out = Path(__file__).resolve().parents[1] / "src" / "hadamard_lab" / "data"
out.mkdir(exist_ok=True)

fam = dita_affine_data(fourier(2), fourier(3), name="f2f3")
transposed = AffineFamilyData(
    name="f2f3-transposed",
    base=CHMatrix(fam.base.entries.T),
    masks=tuple(m.T for m in fam.masks),
)
for data in (fam, transposed):
    path = out / f"{data.name}.json"
    path.write_text(json.dumps(data.to_json(), indent=1) + "\n")
    print("wrote", path)
