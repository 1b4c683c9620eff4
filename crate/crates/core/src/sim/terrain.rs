#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Spring-damper normal contact and regularized Coulomb friction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    /// Friction coefficient.
    pub mu: f64,
    /// Normal stiffness, N/m.
    pub k_n: f64,
    /// Normal damping, N·s/m.
    pub d_n: f64,
    /// Tangential speed below which friction is linear in slip velocity, m/s.
    pub v_slip: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            mu: 0.6,
            k_n: 30_000.0,
            d_n: 300.0,
            v_slip: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerrainShape {
    Flat,
    /// Square cells of side `cell`, each at height 0, `block_height / 2` or `block_height`.
    Blocks {
        block_height: f64,
        cell: f64,
        seed: u64,
    },
}

/// Heightfield plus the contact model the feet see on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terrain {
    pub shape: TerrainShape,
    pub contact: ContactParams,
}

impl Default for Terrain {
    fn default() -> Self {
        Self::flat()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl Terrain {
    pub fn flat() -> Self {
        Self {
            shape: TerrainShape::Flat,
            contact: ContactParams::default(),
        }
    }

    pub fn with_contact(mut self, contact: ContactParams) -> Self {
        self.contact = contact;
        self
    }

    pub fn height(&self, x: f64, y: f64) -> f64 {
        match self.shape {
            TerrainShape::Flat => 0.0,
            TerrainShape::Blocks {
                block_height,
                cell,
                seed,
            } => {
                if block_height == 0.0 {
                    return 0.0;
                }
                let ix = (x / cell).floor() as i64 as u64;
                let iy = (y / cell).floor() as i64 as u64;
                let h = splitmix64(splitmix64(splitmix64(seed) ^ ix) ^ iy);
                match h % 3 {
                    0 => 0.0,
                    1 => 0.5 * block_height,
                    _ => block_height,
                }
            }
        }
    }

    /// Same block layout statistics with a different seed; flat terrain is unchanged.
    pub fn reseeded(&self, offset: u64) -> Self {
        let mut t = *self;
        if let TerrainShape::Blocks { ref mut seed, .. } = t.shape {
            *seed = splitmix64(*seed ^ splitmix64(offset));
        }
        t
    }
}

/// Random block field of the given height and cell size; height 0 is flat.
pub fn make_block_terrain(block_height: f64, cell: f64, seed: u64) -> Terrain {
    debug_assert!(block_height >= 0.0 && cell > 0.0);
    Terrain {
        shape: TerrainShape::Blocks {
            block_height,
            cell,
            seed,
        },
        contact: ContactParams::default(),
    }
}
