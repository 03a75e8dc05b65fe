//! Tetrahedralization of regular grids.

use crate::error::Result;
use crate::mesh::{signed_volume, MultiFieldMesh, RegularGrid};

/// Axis orders whose monotone corner paths define the six tetrahedra of a cell.
const AXIS_ORDERS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Splits every hexahedral cell into six tetrahedra sharing the cell's main
/// diagonal from corner (0,0,0) to (1,1,1).
///
/// Each cell face is cut along the diagonal through its lowest corner, so the
/// triangulation is conforming across neighbouring cells. Tetrahedra are
/// oriented to positive volume and fields are copied unchanged.
pub fn grid_to_mesh(grid: &RegularGrid) -> Result<MultiFieldMesh> {
    let [nx, ny, nz] = grid.dims();
    let [hx, hy, hz] = grid.spacing();
    let mut vertices = Vec::with_capacity(grid.point_count());
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                vertices.push([x as f64 * hx, y as f64 * hy, z as f64 * hz]);
            }
        }
    }

    let mut simplices = Vec::with_capacity((nx - 1) * (ny - 1) * (nz - 1) * 24);
    for z in 0..nz - 1 {
        for y in 0..ny - 1 {
            for x in 0..nx - 1 {
                for order in AXIS_ORDERS {
                    let mut corner = [x, y, z];
                    let mut tet = [0usize; 4];
                    tet[0] = grid.index(corner[0], corner[1], corner[2]);
                    for (k, &axis) in order.iter().enumerate() {
                        corner[axis] += 1;
                        tet[k + 1] = grid.index(corner[0], corner[1], corner[2]);
                    }
                    let vol = signed_volume(
                        vertices[tet[0]],
                        vertices[tet[1]],
                        vertices[tet[2]],
                        vertices[tet[3]],
                    );
                    if vol < 0.0 {
                        tet.swap(2, 3);
                    }
                    simplices.extend_from_slice(&tet);
                }
            }
        }
    }

    let mut mesh = MultiFieldMesh::from_flat_unchecked(vertices, 3, simplices);
    for (name, values) in grid.field_names().iter().zip(grid.fields()) {
        mesh.attach_field(name.clone(), values.clone())?;
    }
    Ok(mesh)
}
