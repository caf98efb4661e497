"""Write the bundled natural-image sample used by configs/fig4_natural.json.

Uses scikit-image's public-domain ``astronaut`` photograph (NASA), kept in
RGB so the pipeline's luma conversion is exercised.  Needs scikit-image,
which the package itself does not depend on.
"""
from pathlib import Path

from PIL import Image
from skimage import data

OUT = Path(__file__).resolve().parents[1] / "src" / "dogillusion" / "configs" / "natural_sample.png"

if __name__ == "__main__":
    Image.fromarray(data.astronaut()).save(OUT, optimize=True)
    print(f"wrote {OUT}")
