#!/usr/bin/env python3
"""Fetch the optional test assets that cannot ship with the repository.

Downloads, into tests/fixtures/:

  tokenizers/llama-3.2-3b.json      tokenizer.json of meta-llama/Llama-3.2-3B
  tokenizers/mistral-7b-v0.3.json   tokenizer.json of mistralai/Mistral-7B-v0.3
  tokenizers/qwen3-8b.json          tokenizer.json of Qwen/Qwen3-8B
  data/penguins.csv                 Palmer penguins table (344 rows, species label)

These enable the soft reproduction checks in tests/test_acceptance.py
(criterion 5). Needs outbound network access; the Llama repository is
gated, so set HF_TOKEN to a HuggingFace token that has accepted its
license. Already-present files are kept unless --force is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

import httpx

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

TOKENIZERS = {
    "llama-3.2-3b.json": "meta-llama/Llama-3.2-3B",
    "mistral-7b-v0.3.json": "mistralai/Mistral-7B-v0.3",
    "qwen3-8b.json": "Qwen/Qwen3-8B",
}

PENGUINS_URL = (
    "https://raw.githubusercontent.com/allisonhorst/palmerpenguins/"
    "main/inst/extdata/penguins.csv"
)


def fetch_tokenizer(client: httpx.Client, filename: str, repo: str, force: bool) -> bool:
    target = FIXTURES / "tokenizers" / filename
    if target.exists() and not force:
        print(f"  {filename}: already present")
        return True
    url = f"https://huggingface.co/{repo}/resolve/main/tokenizer.json"
    headers = {}
    token = os.environ.get("HF_TOKEN")
    if token:
        headers["Authorization"] = f"Bearer {token}"
    resp = client.get(url, headers=headers, follow_redirects=True)
    if resp.status_code != 200:
        hint = " (gated repo: set HF_TOKEN)" if resp.status_code in (401, 403) else ""
        print(f"  {filename}: FAILED HTTP {resp.status_code}{hint}")
        return False
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(resp.content)
    print(f"  {filename}: {len(resp.content) / 1e6:.1f} MB")
    return True


def fetch_penguins(client: httpx.Client, force: bool) -> bool:
    """Penguins with the culmen_* column naming and the species label last."""
    target = FIXTURES / "data" / "penguins.csv"
    if target.exists() and not force:
        print("  penguins.csv: already present")
        return True
    resp = client.get(PENGUINS_URL, follow_redirects=True)
    if resp.status_code != 200:
        print(f"  penguins.csv: FAILED HTTP {resp.status_code}")
        return False
    reader = csv.DictReader(io.StringIO(resp.text))
    renames = {"bill_length_mm": "culmen_length_mm", "bill_depth_mm": "culmen_depth_mm"}
    features = [
        "island", "culmen_length_mm", "culmen_depth_mm",
        "flipper_length_mm", "body_mass_g", "sex",
    ]
    rows = []
    for rec in reader:
        rec = {renames.get(k, k): ("" if v in (None, "NA") else v) for k, v in rec.items()}
        rows.append([rec[c] for c in features] + [rec["species"]])
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(features + ["species"])
        writer.writerows(rows)
    print(f"  penguins.csv: {len(rows)} rows")
    return len(rows) == 344


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--force", action="store_true", help="re-download existing files")
    args = parser.parse_args()

    ok = True
    with httpx.Client(timeout=120) as client:
        print("tokenizer files:")
        for filename, repo in TOKENIZERS.items():
            ok &= fetch_tokenizer(client, filename, repo, args.force)
        print("datasets:")
        ok &= fetch_penguins(client, args.force)
    if not ok:
        print("some assets missing; the corresponding acceptance checks will skip")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
