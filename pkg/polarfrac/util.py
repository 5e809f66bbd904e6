import os
import json
import hashlib
import tempfile

import confuse

from .exceptions import OutputError


def format_float(value):
    """Render a float with the shortest decimal form that round-trips.
    """
    return repr(float(value))


def complex_pair(value):
    """Split a complex number into a JSON-friendly ``[re, im]`` pair.
    """
    value = complex(value)
    return [value.real, value.imag]


def canonical_json(obj):
    """Serialize `obj` deterministically: sorted keys, no whitespace
    variation, floats in their shortest round-trip form.
    """
    return json.dumps(obj, sort_keys=True, separators=(',', ':'))


def digest(obj, length=16):
    """A short hexadecimal sha256 digest of the canonical JSON form of
    `obj`.
    """
    text = canonical_json(obj).encode('utf-8')
    return hashlib.sha256(text).hexdigest()[:length]


def json_pointer(view):
    """Return the RFC 6901 JSON pointer naming the location of a
    `confuse` view, e.g. ``/ensemble/species/0/count``.
    """
    keys = []
    while isinstance(view, confuse.Subview):
        keys.append(view.key)
        view = view.parent
    parts = []
    for key in reversed(keys):
        if isinstance(key, bytes):
            key = key.decode('utf-8')
        key = str(key).replace('~', '~0').replace('/', '~1')
        parts.append(key)
    return u''.join(u'/' + part for part in parts)


def split_list(text):
    """Split a comma- or whitespace-separated command-line list.
    """
    return [item for item in text.replace(',', ' ').split() if item]


def atomic_write(path, text):
    """Write `text` to `path` by way of a temporary file in the same
    directory and a rename, so readers never observe a partial file.

    Raises an `OutputError` when the destination cannot be written.
    """
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        handle, temp = tempfile.mkstemp(
            dir=directory, prefix='.' + os.path.basename(path), suffix='.tmp')
    except OSError as exc:
        raise OutputError(path, exc)

    try:
        with os.fdopen(handle, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(temp, path)
    except OSError as exc:
        try:
            os.unlink(temp)
        except OSError:
            pass
        raise OutputError(path, exc)
    return path
