"""Connect a random pair to its normal form and glue the path into a surface.

The glued surface keeps a single complex point, at the origin.

    python demos/homotopy_and_surface.py
"""

from crpoints import build_isotoped_graph, classify, find_complex_points, normal_form_path, random_pair

pair = random_pair(2, 7, want="hyperbolic")
print("class:", classify(pair).tag.value)

path = normal_form_path(pair, seed=0)
cert = path.certificate
print("segments:", [s.kind.value for s in path.segments])
print(f"certificate: pass={cert.passed} sign={cert.sign:+d} min|det|={cert.min_abs_det:.3g} min rcond={cert.min_rcond:.3g}")
print("endpoint A\n", path.target.A.round(12), "\nendpoint B\n", path.target.B.round(12))

surf = build_isotoped_graph(path, epsilon=1.0)
found = find_complex_points(surf, radius=1.2, grid_per_axis=5)
print(f"\ncomplex points in the 1.2-cube ({found.seeds} Newton seeds):")
for z, res in found.points:
    print("  z =", z.round(10), "residual", f"{res:.1e}")
