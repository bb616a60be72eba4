"""
Verification report helpers shared by every verifier
"""

from typing import Any, Dict, Iterable, List, Optional

from .algebra import GradedMap, format_key, vector_to_dict

PASS = "pass"
FAIL = "fail"


def passed(check: str, details: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    report = {"check": check, "status": PASS}
    if details:
        report["details"] = details
    return report


def failed(check: str, message: str, witness: Optional[Dict[str, Any]] = None,
           details: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    report = {"check": check, "status": FAIL, "message": message}
    if witness:
        report["witness"] = witness
    if details:
        report["details"] = details
    return report


def is_pass(report: Dict[str, Any]) -> bool:
    return report.get("status") == PASS


def combine(check: str, reports: Iterable[Dict[str, Any]],
            details: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Group sub-reports; the group fails when any member fails."""
    reports = list(reports)
    status = PASS if all(is_pass(r) for r in reports) else FAIL
    combined = {"check": check, "status": status, "checks": reports}
    if details:
        combined["details"] = details
    return combined


def first_failure(report: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    if report.get("status") != FAIL:
        return None
    for sub in report.get("checks", []):
        found = first_failure(sub)
        if found:
            return found
    return report


def map_witness(residual: GradedMap, **extra) -> Optional[Dict[str, Any]]:
    """First source basis vector (declared order) on which a residual map is nonzero."""
    if residual.is_zero():
        return None
    for key in residual.source:
        column = residual.column(key)
        if column:
            witness = {"degree": key[0], "basis": format_key(key), "value": vector_to_dict(column)}
            witness.update(extra)
            return witness
    return None


def first_difference(left: GradedMap, right: GradedMap, **extra) -> Optional[Dict[str, Any]]:
    return map_witness(left - right, **extra)


def residual_report(check: str, residual: GradedMap, message: str, **extra) -> Dict[str, Any]:
    witness = map_witness(residual, **extra)
    if witness is None:
        return passed(check, dict(extra) if extra else None)
    return failed(check, message, witness)


def failed_checks(reports: Iterable[Dict[str, Any]]) -> List[Dict[str, Any]]:
    return [r for r in reports if not is_pass(r)]
