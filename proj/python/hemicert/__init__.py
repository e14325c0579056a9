# SPDX-License-Identifier: Apache-2.0
"""Exact certification of the hemisphere four-point distance-sum maximum."""

from ._hemicert import (
    GlobalCertificate,
    LocalCertificate,
    majorization_sampling,
    numeric_max_search,
    objective,
    optimum_decimal,
    optimum_value,
    parse_global_certificate,
    parse_local_certificate,
    report,
    verify_global,
    verify_local,
)

__all__ = [
    "GlobalCertificate",
    "LocalCertificate",
    "majorization_sampling",
    "numeric_max_search",
    "objective",
    "optimum_decimal",
    "optimum_value",
    "parse_global_certificate",
    "parse_local_certificate",
    "report",
    "verify_global",
    "verify_local",
]
