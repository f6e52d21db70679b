"""
Feature files and the command line
==================================

Datasets live on disk as a JSON manifest, one binary feature file per view
and a labels CSV. The ``mdfm`` command reads them.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from mdfm.features import load_dataset, write_dataset
from mdfm.synth import SynthSpec, generate

root = Path(tempfile.mkdtemp())
data = generate(SynthSpec(class_count=10, samples_per_class=40, dim=16, view_count=3,
                          noise_sigma=3.0, shift_sigma=4.0, seed=1))
manifest = write_dataset(data, root / "toy")
print(json.dumps(manifest.to_json(), indent=2))

back = load_dataset(root / "toy" / "manifest.json")
print("round trip exact:", all(a.features.tobytes() == b.features.tobytes()
                               for a, b in zip(data.view_sets, back.view_sets)))


def mdfm(*args):
    cmd = [sys.executable, "-m", "mdfm.cli", *args]
    return subprocess.run(cmd, capture_output=True, text=True, check=True).stdout.strip()


m = str(root / "toy" / "manifest.json")
print(mdfm("eval", "--manifest", m, "--episodes", "50"))
print(mdfm("eval", "--manifest", m, "--episodes", "50", "--views", "view0"))
print(mdfm("semi", "--manifest", m, "--episodes", "50", "--unlabeled", "0,5,10",
           "--transform", "pca", "--l2-normalize"))
print(mdfm("weights", "--losses", "0.2,0.4,0.6"))
