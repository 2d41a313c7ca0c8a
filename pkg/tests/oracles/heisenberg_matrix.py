"""Integer-matrix model of the Heisenberg group.

f1 -> I + E12, f2 -> I + E23, f3 -> I + E13 (3x3 upper unitriangular).
The normal form f1^a f2^b f3^c has matrix [[1, a, ab + c], [0, 1, b], [0, 0, 1]].
Independent of the package.
"""


def to_matrix(g):
    a, b, c = g
    return [[1, a, a * b + c], [0, 1, b], [0, 0, 1]]


def from_matrix(m):
    a, b, y = m[0][1], m[1][2], m[0][2]
    assert m[1][0] == m[2][0] == m[2][1] == 0 and m[0][0] == m[1][1] == m[2][2] == 1
    return (a, b, y - a * b)


def matmul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def product(g, h):
    return from_matrix(matmul(to_matrix(g), to_matrix(h)))


def inverse(g):
    a, b, c = g
    # inverse of [[1, a, y], [0, 1, b]] is [[1, -a, ab - y], [0, 1, -b]]
    y = a * b + c
    return from_matrix([[1, -a, a * b - y], [0, 1, -b], [0, 0, 1]])


if __name__ == "__main__":
    print("f2*f1 =", product((0, 1, 0), (1, 0, 0)))
    print("(f1*f2)^-1 =", inverse((1, 1, 0)))
