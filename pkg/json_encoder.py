"""
json_encoder.py - JSON encoding for security reports with proper handling of special values
"""

import json
import math
import os
from dataclasses import asdict, is_dataclass
from enum import Enum

import numpy as np


class ImprovedJSONEncoder(json.JSONEncoder):
    """
    A custom JSON encoder that properly handles:
    - NumPy types
    - Dataclasses and enums
    """
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return clean_data_for_json(float(obj))
        elif isinstance(obj, np.ndarray):
            return clean_data_for_json(obj.tolist())
        elif isinstance(obj, np.bool_):
            return bool(obj)
        elif is_dataclass(obj) and not isinstance(obj, type):
            return clean_data_for_json(asdict(obj))
        elif isinstance(obj, Enum):
            return obj.value

        return super(ImprovedJSONEncoder, self).default(obj)


def clean_data_for_json(data):
    """
    Recursively clean data to ensure it's JSON-serializable without problems.

    Infinite values become the string "inf" (or "-inf") and NaN becomes null,
    since the encoder is never consulted for plain Python floats.

    Args:
        data: Data to clean (can be dict, list, or scalar)

    Returns:
        Cleaned data safe for JSON serialization
    """
    if isinstance(data, dict):
        return {str(k): clean_data_for_json(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [clean_data_for_json(item) for item in data]
    elif isinstance(data, (bool, np.bool_)):
        return bool(data)
    elif isinstance(data, np.integer):
        return int(data)
    elif isinstance(data, (np.floating, float)):
        value = float(data)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    elif is_dataclass(data) and not isinstance(data, type):
        return clean_data_for_json(asdict(data))
    elif isinstance(data, Enum):
        return data.value
    else:
        return data


def write_json_report(data, path):
    """Write a report with sorted keys so equal inputs give byte-identical files."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(clean_data_for_json(data), f, cls=ImprovedJSONEncoder, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
