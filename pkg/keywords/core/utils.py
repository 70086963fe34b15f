import hashlib
import os
from pathlib import Path

from django.conf import settings


def file_digest(path, chunk_size=1 << 20):
    """
    SHA-256 hex digest of a file's contents.

    :param path: file to hash
    :return: hex digest string
    """
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def decode_threads():
    """Worker cap for parallel decoding; never below one."""
    configured = getattr(settings, "TRIE_DECODE_THREADS", None) or os.cpu_count() or 1
    return max(1, int(configured))


def parse_list(value, cast):
    """Parse a comma separated command-line list, e.g. ``"5,10,15"``."""
    return [cast(part.strip()) for part in str(value).split(",") if part.strip()]
