""" Trace records emitted at every checkpoint of every replicate """
from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass
from typing import Iterable, List

TRACE_HEADER = ('replicate', 'n', 'statistic', 'value', 'lower', 'upper')


@dataclass(frozen=True)
class TraceRecord:
    """One statistic of one replicate at one checkpoint

    `lower` and `upper` are the sandwich bounds of mass and rate statistics,
    and nan otherwise.
    """

    replicate: int
    n: int
    statistic: str
    value: float
    lower: float = math.nan
    upper: float = math.nan

    @property
    def is_bounded(self) -> bool:
        return not (math.isnan(self.lower) or math.isnan(self.upper))


def format_float(value: float) -> str:
    """shortest round-tripping representation, with inf/-inf/nan spelled out"""
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(float(value))


def write_trace(path: str, records: Iterable[TraceRecord]):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TRACE_HEADER)
        for record in records:
            replicate, n, statistic, value, lower, upper = astuple(record)
            writer.writerow(
                [
                    replicate,
                    n,
                    statistic,
                    format_float(value),
                    format_float(lower),
                    format_float(upper),
                ]
            )


def read_trace(path: str) -> List[TraceRecord]:
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValueError(f'{path} does not have a trace header')
        return [
            TraceRecord(
                int(row['replicate']),
                int(row['n']),
                row['statistic'],
                float(row['value']),
                float(row['lower']),
                float(row['upper']),
            )
            for row in reader
        ]
