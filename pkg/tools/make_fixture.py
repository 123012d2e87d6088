"""Generate the bundled eyeglass fixture: 163 crowdsourced-style failure
reports over 40 tiny PNG instances, plus a themed toy vector file covering
the report vocabulary. Everything is seeded, so re-running this script
reproduces the committed files byte for byte.

Usage: python tools/make_fixture.py
"""

from __future__ import annotations

import json
import struct
import sys
import zlib
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from blindspot.concepts import default_stopwords, extract_candidates  # noqa: E402
from blindspot.corpus import content_hash  # noqa: E402

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "blindspot" / "fixtures" / "eyeglass"

LABELS = ["glasses", "no_glasses"]

N_REPORTS = 163
N_INSTANCES = 40
VECTOR_DIM = 50
SEED = 20210301

# Sentence bank, grouped by failure theme. A few sentences are phrased so
# that the words "thin", "transparent", and "rims" surface as standalone
# concepts (isolated between stopwords), which the test suite relies on.
THEMES: dict[str, list[str]] = {
    "thin_clear_frames": [
        "The glasses have thin clear frames and she is looking sideways.",
        "The frames are thin and transparent.",
        "Frames are thin, almost invisible against the skin.",
        "His glasses are rimless with a thin metal bridge.",
        "The wire frames are so thin the model probably missed them.",
        "She wears clear plastic glasses that blend into her face.",
        "The frames are transparent, and the lenses have no tint at all.",
        "Very thin gold frames that disappear against the hair.",
        "The spectacles are frameless and the lenses are transparent.",
        "Thin clear frames sit low on the nose.",
    ],
    "rimless": [
        "The rims are transparent.",
        "The rims are thin and the glasses sit close to the eyes.",
        "No rims at all, just bare lenses in front of the eyes.",
        "The glasses are rimless so there is no outline to detect.",
        "The rims are barely visible because they are clear acrylic.",
        "Half rims only on top, nothing under the lenses.",
    ],
    "dark_lenses": [
        "The lenses are tinted dark like sunglasses.",
        "Dark tinted lenses cover most of the eyes.",
        "He wears sunglasses with heavy black shades.",
        "The tinted lenses are so dark the eyes are hidden.",
        "Reflective sunglasses bounce light back at the camera.",
        "The sunglasses are mirrored and show the photographer.",
    ],
    "occlusion": [
        "Hair is covering half of the face and one eye.",
        "A hat casts a deep shadow over the eyes.",
        "Her hand is in front of her face, blocking the glasses.",
        "Long bangs hang over the eyes and hide the frames.",
        "The face is obstructed by a scarf pulled up high.",
        "A helmet covers the forehead and shades both eyes.",
        "The hat brim hides the top half of the frames.",
    ],
    "image_quality": [
        "The image is blurry and very low resolution.",
        "The photo is grainy, taken in dim light.",
        "Strong backlight washes out the whole face.",
        "The picture is overexposed and the face is too bright.",
        "Heavy noise in the image makes the glasses hard to see.",
    ],
    "pose": [
        "The person is looking sideways away from the camera.",
        "The head is turned so only one lens is visible.",
        "She is glancing down, so the frames line up with the eyebrows.",
        "Profile shot, the glasses show up only as an edge.",
        "The face is tilted back and the glasses catch the ceiling light.",
    ],
    "eyebrows": [
        "Thick dark eyebrows could be confused with frames.",
        "The eyebrows are bushy and read as a top rim.",
        "Strong eyebrow lines mimic the shape of glasses.",
    ],
    "odd_position": [
        "The glasses are pushed up on top of the head.",
        "Reading glasses hang low on the tip of the nose.",
        "The glasses are worn crooked, one ear higher than the other.",
        "Spectacles dangle from the shirt collar, not on the face.",
    ],
}

# Themes describing missed glasses are false negatives; the rest lean
# toward false positives on bare faces.
FALSE_NEGATIVE_THEMES = {"thin_clear_frames", "rimless", "dark_lenses", "pose", "odd_position"}


def make_png(rgba: tuple[int, int, int, int], size: int = 4) -> bytes:
    """Minimal deterministic PNG: solid color, fixed zlib level."""
    raw = b"".join(b"\x00" + bytes(rgba) * size for _ in range(size))
    compressed = zlib.compress(raw, 9)

    def chunk(kind: bytes, payload: bytes) -> bytes:
        body = kind + payload
        return struct.pack(">I", len(payload)) + body + struct.pack(">I", zlib.crc32(body))

    header = struct.pack(">IIBBBBB", size, size, 8, 6, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", header)
        + chunk(b"IDAT", compressed)
        + chunk(b"IEND", b"")
    )


def main() -> None:
    rng = np.random.default_rng(SEED)
    blob_dir = OUT_DIR / "blobs"
    blob_dir.mkdir(parents=True, exist_ok=True)

    instances = []
    for i in range(N_INSTANCES):
        color = (int(rng.integers(0, 256)), int(rng.integers(0, 256)), int(rng.integers(0, 256)), 255)
        data = make_png(color)
        iid = content_hash(data)
        (blob_dir / iid).write_bytes(data)
        instances.append(iid)

    theme_names = list(THEMES)
    sentence_pool = [(theme, text) for theme in theme_names for text in THEMES[theme]]

    # Every sentence appears at least once; the rest are sampled.
    picks = list(range(len(sentence_pool)))
    while len(picks) < N_REPORTS:
        picks.append(int(rng.integers(0, len(sentence_pool))))
    rng.shuffle(picks)

    base_time = datetime(2021, 3, 1, 9, 0, 0, tzinfo=timezone.utc)
    lines = []
    for i, pick in enumerate(picks[:N_REPORTS]):
        theme, text = sentence_pool[pick]
        false_negative = theme in FALSE_NEGATIVE_THEMES
        record = {
            "id": f"fr-{i + 1:04d}",
            "instance_ref": instances[i % N_INSTANCES],
            "model_output": "no_glasses" if false_negative else "glasses",
            "ground_truth": "glasses" if false_negative else "no_glasses",
            "text": text,
            "source": "crowdsourced",
            "created_at": (base_time + timedelta(seconds=137 * i)).isoformat(),
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    (OUT_DIR / "reports.ndjson").write_text("".join(line + "\n" for line in lines) + "", encoding="utf-8")

    manifest = {
        "config": {
            "task_kind": "classification",
            "prompt_kind": "why",
            "label_set": LABELS,
        },
        "instances": len(instances),
        "reports": N_REPORTS,
    }
    (OUT_DIR / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    # Toy vector file: one cluster center per theme, member words scattered
    # around it, so related concepts land near each other in the layout.
    stopwords = default_stopwords()
    word_theme: dict[str, str] = {}
    for theme, sentences in THEMES.items():
        for sentence in sentences:
            for phrase in extract_candidates(sentence, stopwords):
                for word in phrase.split(" "):
                    word_theme.setdefault(word, theme)

    centers = {}
    for theme in theme_names:
        center = rng.normal(0.0, 1.0, VECTOR_DIM)
        centers[theme] = center / np.linalg.norm(center)

    vector_lines = []
    for word in sorted(word_theme):
        center = centers[word_theme[word]]
        vec = center + rng.normal(0.0, 0.18, VECTOR_DIM)
        vector_lines.append(word + " " + " ".join(f"{v:.5f}" for v in vec))
    (OUT_DIR / "vectors.txt").write_text("".join(line + "\n" for line in vector_lines), encoding="utf-8")

    print(f"wrote {N_REPORTS} reports, {len(instances)} blobs, {len(vector_lines)} vectors to {OUT_DIR}")


if __name__ == "__main__":
    main()
