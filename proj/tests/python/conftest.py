import json

import numpy as np
import pytest


def write_fgrid(directory, entries, label="ingested"):
    """Write an fgrid dataset the way the converter does: manifest.json plus raw little-endian binary32."""
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {"format": "fgrid", "version": 1, "source_label": label, "entries": []}
    for e in entries:
        values = np.asarray(e["values"], dtype="<f4")
        name = e.get("file", f"{e['variable']}_{e['level']}_{e['time'].replace(':', '')}.f32")
        values.tofile(directory / name)
        nlat, nlon = values.shape
        manifest["entries"].append({
            "variable": e["variable"],
            "level_hPa": e["level"],
            "valid_time": e["time"],
            "units": e["units"],
            "file": name,
            "grid": {
                "nlat": nlat, "nlon": nlon,
                "lat_start": e.get("lat_start", 60.0), "lat_step": -1.0,
                "lon_start": e.get("lon_start", 330.0), "lon_step": 1.0,
                "includes_poles": False, "global_lon": False,
            },
        })
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return directory


@pytest.fixture
def fgrid_writer():
    return write_fgrid
