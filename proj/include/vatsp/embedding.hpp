#pragma once

#include <vector>

namespace vatsp {

// Combinatorial embedding: rot[v] is the cyclic neighbour order of a planar
// vertex (simple planar piece). Face tracing: arriving at v from u, the walk
// continues to the successor of u in rot[v].
using Rotation = std::vector<std::vector<int>>;

int rot_succ(const Rotation& rot, int v, int from);
int rot_index(const Rotation& rot, int v, int nbr);

// Face containing the dart u->v, as the cyclic sequence of tails starting at u.
std::vector<int> trace_face(const Rotation& rot, int u, int v);

// Every face of the planar vertices; isolated planar vertices form the face {v}.
std::vector<std::vector<int>> trace_faces(const Rotation& rot, const std::vector<char>& planar);

struct EmbeddingStats {
    bool symmetric = true;
    int vertices = 0, edges = 0, faces = 0, components = 0;
    // Sum over components of (2 - V + E - F) / 2; zero iff the embedding is planar.
    int genus = 0;
};
EmbeddingStats embedding_stats(const Rotation& rot, const std::vector<char>& planar);

// Inserts edge u-w: w goes right after pred_u in rot[u] and u right after pred_w
// in rot[w] (pred -1 when the vertex has no neighbours yet). Both corners must
// lie on a common face (or on faces of different components).
void insert_edge(Rotation& rot, int u, int pred_u, int w, int pred_w);

// True iff `face` equals the traced face through its first two vertices, up to
// cyclic rotation.
bool is_traced_face(const Rotation& rot, const std::vector<int>& face);

}  // namespace vatsp
