//! Legacy-VTK ASCII export of flow fields as quadratic triangles.
//!
//! Points are the velocity locations (nodes then edge midpoints), cells are
//! `VTK_QUADRATIC_TRIANGLE`, with the velocity vector at every point and the
//! linear pressure interpolated to midpoints. Output bytes are deterministic
//! for identical inputs.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::space::{FESpace, FlowField};

pub fn export_field(space: &FESpace, field: &FlowField, path: impl AsRef<Path>) -> Result<()> {
    if !field.matches(space) {
        return Err(Error::SpaceMismatch("field does not match space".into()));
    }
    let n_points = space.num_velocity_locations();
    let n_cells = space.mesh().num_triangles();

    let mut out = String::new();
    out.push_str("# vtk DataFile Version 2.0\n");
    out.push_str("channel flow field\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {n_points} double\n"));
    for loc in 0..n_points {
        let [x, y] = space.location_coords(loc);
        out.push_str(&format!("{x} {y} 0\n"));
    }
    out.push_str(&format!("CELLS {n_cells} {}\n", 7 * n_cells));
    for t in 0..n_cells {
        let locs = space.tri_locations(t);
        out.push_str(&format!(
            "6 {} {} {} {} {} {}\n",
            locs[0], locs[1], locs[2], locs[3], locs[4], locs[5]
        ));
    }
    out.push_str(&format!("CELL_TYPES {n_cells}\n"));
    for _ in 0..n_cells {
        out.push_str("22\n");
    }
    out.push_str(&format!("POINT_DATA {n_points}\n"));
    out.push_str("VECTORS velocity double\n");
    for loc in 0..n_points {
        let ux = field.u[space.dof(loc, 0)];
        let uy = field.u[space.dof(loc, 1)];
        out.push_str(&format!("{ux} {uy} 0\n"));
    }
    out.push_str("SCALARS pressure double 1\n");
    out.push_str("LOOKUP_TABLE default\n");
    let midpoint_pressure = midpoint_pressures(space, &field.p);
    for loc in 0..n_points {
        let p = if loc < space.mesh().num_nodes() {
            field.p[loc]
        } else {
            midpoint_pressure[loc - space.mesh().num_nodes()]
        };
        out.push_str(&format!("{p}\n"));
    }

    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

fn midpoint_pressures(space: &FESpace, p: &[f64]) -> Vec<f64> {
    let n_nodes = space.mesh().num_nodes();
    let mut out = vec![0.0; space.num_velocity_locations() - n_nodes];
    // midpoint pressure is the average of the edge endpoints (exact for P1)
    for t in 0..space.mesh().num_triangles() {
        let tri = space.mesh().triangles[t];
        let locs = space.tri_locations(t);
        for (k, &(a, b)) in [(0usize, 1usize), (1, 2), (2, 0)].iter().enumerate() {
            let mid = locs[3 + k] - n_nodes;
            out[mid] = 0.5 * (p[tri[a]] + p[tri[b]]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::force::ZeroForce;
    use crate::mesh::build_channel_mesh;
    use crate::space::{build_taylor_hood, ControlProfile};

    #[test]
    fn zero_field_exports_zeros_with_correct_counts() {
        let mesh = build_channel_mesh(5.0, 1.0, 4, 2, None).unwrap();
        let space = build_taylor_hood(&mesh).unwrap();
        let field = FlowField::zeros(&space);
        let dir = std::env::temp_dir().join("inflow-vtk");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("zero.vtk");
        export_field(&space, &field, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains(&format!("POINTS {} double", space.num_velocity_locations())));
        assert!(text.contains(&format!("CELL_TYPES {}", mesh.num_triangles())));
        assert!(text.contains("VECTORS velocity double"));
        let zeros = text.lines().filter(|l| *l == "0 0 0").count();
        assert!(zeros >= space.num_velocity_locations());
    }

    #[test]
    fn poiseuille_export_peaks_at_the_inlet_amplitude() {
        let mesh = build_channel_mesh(5.0, 1.0, 10, 4, None).unwrap();
        let space = build_taylor_hood(&mesh).unwrap();
        let g = ControlProfile::from_fn(&space, |y| [4.0 * y * (1.0 - y), 0.0]);
        let field = crate::stokes::solve_stokes(&space, 1.0, &g, &ZeroForce).unwrap();
        let dir = std::env::temp_dir().join("inflow-vtk");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("poiseuille.vtk");
        export_field(&space, &field, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let start = text.find("VECTORS velocity double").unwrap();
        let max_ux = text[start..]
            .lines()
            .skip(1)
            .take(space.num_velocity_locations())
            .map(|l| l.split_whitespace().next().unwrap().parse::<f64>().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((max_ux - 1.0).abs() < 1e-9, "max u_x in file: {max_ux}");
    }

    #[test]
    fn re_export_is_byte_identical() {
        let mesh = build_channel_mesh(2.0, 1.0, 3, 2, None).unwrap();
        let space = build_taylor_hood(&mesh).unwrap();
        let mut field = FlowField::zeros(&space);
        for (i, v) in field.u.iter_mut().enumerate() {
            *v = (i as f64 * 0.7).sin();
        }
        let dir = std::env::temp_dir().join("inflow-vtk");
        std::fs::create_dir_all(&dir).unwrap();
        let a = dir.join("a.vtk");
        let b = dir.join("b.vtk");
        export_field(&space, &field, &a).unwrap();
        export_field(&space, &field, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
