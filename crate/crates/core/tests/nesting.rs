use std::f64::consts::PI;

use tcross::montecarlo::summarize;
use tcross::nesting::{
    cell_crossing_count, cell_crossing_count_explicit, component_crossings, component_edges_for_cell, total_z,
    ModelSpec, TessellationSpec,
};
use tcross::tessellate::{generate, GeneratorOptions, SeedStream, TessellationKind, WindowShape, WindowSpec};
use tcross::{ConvexPolygon, Point, Segment};

fn boundary() -> Vec<Segment> {
    ConvexPolygon::regular(Point::new(0.3, -0.2), 1.5, 7).unwrap().edges().collect()
}

fn mean_count(kind: TessellationKind, lambda: f64, n: u64) -> (f64, f64) {
    let b = boundary();
    let spec = TessellationSpec { kind, intensity: lambda };
    let root = SeedStream::new(17);
    let v: Vec<f64> = (0..n).map(|i| component_crossings(&spec, &b, &root.child(i)).unwrap() as f64).collect();
    let s = summarize(&v).unwrap();
    (s.mean, (s.variance / n as f64).sqrt())
}

#[test]
fn line_component_mean_is_twice_the_hit_mean() {
    let perim: f64 = boundary().iter().map(|s| s.length()).sum();
    let (m, se) = mean_count(TessellationKind::Plt, 1.3, 4000);
    let want = 2.0 * 1.3 * perim / PI;
    assert!((m - want).abs() < 3.0 * se, "{m} vs {want} (se {se})");
}

#[test]
fn voronoi_component_mean_follows_edge_intensity() {
    let perim: f64 = boundary().iter().map(|s| s.length()).sum();
    let (m, se) = mean_count(TessellationKind::Pvt, 2.0, 3000);
    // edge length intensity 2 sqrt(gamma), crossings per unit curve length 2/pi of it
    let want = 4.0 * 2.0_f64.sqrt() * perim / PI;
    assert!((m - want).abs() < 3.0 * se, "{m} vs {want} (se {se})");
}

#[test]
fn walk_agrees_with_explicit_edges_on_generated_cells() {
    let w = WindowSpec::new(WindowShape::Square, 3.0).unwrap().window();
    let t = generate(TessellationKind::Pvt, 1.0, &w, &GeneratorOptions::default(), &SeedStream::new(3)).unwrap();
    let spec = TessellationSpec { kind: TessellationKind::Pvt, intensity: 2.5 };
    for (rank, ci) in t.rank_order().into_iter().enumerate() {
        let b = t.exposed_boundary(ci, &w);
        if b.is_empty() {
            continue;
        }
        let seeds = SeedStream::new(11).child(rank as u64);
        let e = component_edges_for_cell(&spec, &b, &seeds).unwrap();
        let walk = cell_crossing_count(&e, &b).unwrap();
        assert_eq!(walk, cell_crossing_count_explicit(&e, &b).unwrap());
        assert_eq!(walk, component_crossings(&spec, &b, &seeds).unwrap());
    }
}

#[test]
fn total_is_sum_over_cells() {
    let w = WindowSpec::new(WindowShape::Disc, 4.0).unwrap().window();
    let model = ModelSpec::new(
        TessellationSpec { kind: TessellationKind::Plt, intensity: 1.0 },
        TessellationSpec { kind: TessellationKind::Plt, intensity: 1.0 },
    )
    .unwrap();
    let t = generate(TessellationKind::Plt, 1.0, &w, &GeneratorOptions::default(), &SeedStream::new(8)).unwrap();
    let r = total_z(&t, &model, &w, &SeedStream::new(9)).unwrap();
    assert_eq!(r.z_total, r.per_cell.iter().map(|c| c.theta).sum::<u64>());
    assert_eq!(r.cells_touched, r.per_cell.len());
    // every boundary piece inside the disc is counted from both sides
    let inside: f64 = r.per_cell.iter().map(|c| c.boundary_length).sum();
    let edges = tcross::tessellate::edge_length_in(&t, &w).unwrap();
    assert!((inside - 2.0 * edges).abs() < 1e-6 * edges.max(1.0), "{inside} vs {edges}");
}
