from collections import deque

INF = float("inf")


def distances_from(adj, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distance(adj, x, y):
    return distances_from(adj, x).get(y, INF)


def shortest_paths(adj, x, y, limit=2, dist=None):
    """Up to `limit` shortest x-y paths, each as a vertex tuple starting at x.

    `dist` may carry precomputed distances from y.
    """
    if dist is None:
        dist = distances_from(adj, y)
    if x not in dist:
        return []
    paths = []

    def walk(path):
        if len(paths) >= limit:
            return
        u = path[-1]
        if u == y:
            paths.append(tuple(path))
            return
        for w in sorted(adj[u]):
            if dist.get(w, INF) == dist[u] - 1:
                path.append(w)
                walk(path)
                path.pop()

    walk([x])
    return paths


def girth(adj):
    """Length of a shortest cycle (inf for forests): per edge, shortest detour."""
    best = INF
    for u in adj:
        for w in adj[u]:
            if u < w:
                # BFS from u avoiding the edge u-w
                dist = {u: 0}
                queue = deque([u])
                while queue:
                    a = queue.popleft()
                    if dist[a] + 2 >= best:
                        break
                    for b in adj[a]:
                        if (a, b) in ((u, w), (w, u)) or b in dist:
                            continue
                        dist[b] = dist[a] + 1
                        queue.append(b)
                if w in dist:
                    best = min(best, dist[w] + 1)
    return best


def eccentricities(adj):
    out = {}
    for u in adj:
        d = distances_from(adj, u)
        out[u] = max(d.values()) if len(d) == len(adj) else INF
    return out


def has_short_cycle_near(adj, sources, limit):
    """Whether some cycle of length < limit shows up in a BFS of depth limit // 2 from a source.

    Every cycle of length < limit through a source is found this way, and
    anything found is a genuine cycle of length < limit.
    """
    reach = (limit - 1) // 2
    for s in sources:
        dist = {s: 0}
        parent = {s: None}
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if w == parent[u] or parent.get(w) == u:
                    continue
                if w in dist:
                    if dist[u] + dist[w] + 1 < limit:
                        return True
                    continue
                if dist[u] < reach:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
    return False
