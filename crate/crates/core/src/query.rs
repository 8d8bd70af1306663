//! Connectivity queries against one update: lift each endpoint into the
//! affected vertex set, or settle it inside an untouched component.

use crate::hierarchy::Hierarchy;
use crate::preprocess::{AdjacencyLists, GlobalOrder};
use crate::update::UpdateState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    BothLifted,
    SameIsolatedComponent,
    CrossIsolated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct QueryResult {
    pub connected: bool,
    pub resolution: Resolution,
}

/// Where an endpoint ends up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representative {
    /// A vertex of `Q★` connected to the endpoint.
    Lifted(usize),
    /// The endpoint's component is untouched and has no live outside
    /// neighbour.
    Isolated(usize),
}

pub(crate) struct QueryContext<'a> {
    pub h: &'a Hierarchy,
    pub order: &'a GlobalOrder,
    pub lists: &'a AdjacencyLists,
    pub on: &'a [bool],
}

impl QueryContext<'_> {
    pub fn in_v_new(&self, st: &UpdateState, v: usize) -> bool {
        if self.on[v] {
            !st.in_d_on(v)
        } else {
            st.in_d_off(v)
        }
    }

    pub fn in_q_star(&self, st: &UpdateState, v: usize) -> bool {
        if st.in_d_off(v) {
            return true;
        }
        if !self.on[v] || st.in_d_on(v) {
            return false;
        }
        let t = self.h.terminal_tree[v];
        t != crate::hierarchy::NONE && st.is_affected_tree(t as usize)
    }

    /// Highest unaffected component on `u`'s chain.
    pub fn maximal_unaffected(&self, st: &UpdateState, u: usize) -> Option<usize> {
        self.h.chain[u]
            .iter()
            .rev()
            .map(|&c| c as usize)
            .find(|&c| !st.is_affected_component(c))
    }

    pub fn find_representative(&self, st: &UpdateState, u: usize) -> Representative {
        if self.in_q_star(st, u) {
            return Representative::Lifted(u);
        }
        let top = self
            .maximal_unaffected(st, u)
            .expect("a live vertex outside Q★ has an unaffected component");
        for &w in &st.d_off {
            let rank = (self.order.pos[w] - self.order.off_start) as usize;
            if self.lists.off.get(rank, top) {
                return Representative::Lifted(w);
            }
        }
        for &p in self.lists.a_on(top).iter().take(st.d_on.len() + 1) {
            let w = self.order.pi[p as usize];
            if !st.in_d_on(w) {
                return Representative::Lifted(w);
            }
        }
        Representative::Isolated(top)
    }

    /// Group of a `Q★` vertex.
    pub fn lift_to_group(&self, st: &UpdateState, w: usize) -> Option<u32> {
        st.interval_at(self.order.pos[w]).map(|i| st.group[i])
    }

    pub fn query(&self, st: &UpdateState, u: usize, v: usize) -> QueryResult {
        let ru = self.find_representative(st, u);
        let rv = if u == v {
            ru
        } else {
            self.find_representative(st, v)
        };
        match (ru, rv) {
            (Representative::Lifted(a), Representative::Lifted(b)) => {
                let ga = self
                    .lift_to_group(st, a)
                    .expect("Q★ vertex lies in an interval");
                let gb = self
                    .lift_to_group(st, b)
                    .expect("Q★ vertex lies in an interval");
                QueryResult {
                    connected: ga == gb,
                    resolution: Resolution::BothLifted,
                }
            }
            (Representative::Isolated(a), Representative::Isolated(b)) => QueryResult {
                connected: a == b,
                resolution: Resolution::SameIsolatedComponent,
            },
            _ => QueryResult {
                connected: false,
                resolution: Resolution::CrossIsolated,
            },
        }
    }
}
