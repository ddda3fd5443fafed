"""Write the compiled-in example models to models/*.json."""
from pathlib import Path

from jetnoether.models import BUILTINS

out = Path(__file__).resolve().parent.parent / "models"
out.mkdir(exist_ok=True)
for name, text in BUILTINS.items():
    (out / f"{name}.json").write_text(text)
    print(f"wrote {out / (name + '.json')}")
