"""
Which damping functions pass the certificates
=============================================

Uniqueness needs the radial derivative ``S = x phi_x + y phi_y`` to keep a
strict sign away from the origin. A few models and how each one fares.
"""

from limcyc import certify_report, model_from_source, qpoly

models = {
    "etba": "x^2 + x*y + y^2 - 1",
    "circle": "x^2 + y^2 - 4",
    "van der Pol": "x^2 - 1",
    "two rings": "(x^2 + y^2 - 1)*(x^2 + y^2 - 4)",
    "positive": "1",
}
for name, src in models.items():
    rep = certify_report(model_from_source(src))
    c = rep.certificate
    method = c.method.value if c.method else "-"
    print(f"{name:12s} {c.status.value:15s} {method:22s} {rep.verdict.kind.value}")
    for r in rep.verdict.reasons:
        if not r["passed"]:
            print("    failed:", r["hypothesis"], "|", r["evidence"])

# the quadratic form Q = x^2 + xy + y^2 makes S a polynomial in Q
m = qpoly()
print("S =", m.S)
print("inner discriminant:", certify_report(m).certificate.details["discriminant"])
