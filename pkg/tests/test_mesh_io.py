import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapeqc import (
    EmptyMeshError,
    FaceIndexError,
    ParseError,
    PointCloud,
    TriangleMesh,
    load_mesh,
    load_point_cloud,
    save_mesh,
    save_point_cloud,
)

TETRA_V = np.array(
    [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
)
TETRA_F = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])


def tetra():
    return TriangleMesh(TETRA_V, TETRA_F)


class TestTriangleMesh:
    def test_shapes_and_dtypes(self):
        m = tetra()
        assert m.vertices.shape == (4, 3)
        assert m.faces.shape == (4, 3)
        assert m.vertices.dtype == np.float64
        assert m.faces.dtype == np.int64

    def test_out_of_range_face_rejected(self):
        with pytest.raises(ValueError):
            TriangleMesh(TETRA_V, [[0, 1, 4]])
        with pytest.raises(ValueError):
            TriangleMesh(TETRA_V, [[0, 1, -1]])

    def test_repeated_vertex_in_face_rejected(self):
        with pytest.raises(ValueError):
            TriangleMesh(TETRA_V, [[0, 1, 1]])

    def test_nonfinite_vertices_rejected(self):
        v = TETRA_V.copy()
        v[0, 0] = np.nan
        with pytest.raises(ValueError):
            TriangleMesh(v, TETRA_F)


class TestPointCloud:
    def test_count(self):
        c = PointCloud(np.zeros((5, 3)))
        assert c.count == 5

    def test_nonfinite_rejected(self):
        p = np.zeros((2, 3))
        p[1, 2] = np.inf
        with pytest.raises(ValueError):
            PointCloud(p)


class TestObj:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.obj"
        save_mesh(tetra(), path)
        back = load_mesh(path)
        np.testing.assert_array_equal(back.vertices, TETRA_V)
        np.testing.assert_array_equal(back.faces, TETRA_F)

    def test_full_precision_round_trip(self, tmp_path):
        v = np.array([[1 / 3, np.pi, -2.5e-17], [1.0, 0.0, 0.0], [0.0, 1.0, 7e300]])
        m = TriangleMesh(v, [[0, 1, 2]])
        path = tmp_path / "m.obj"
        save_mesh(m, path)
        np.testing.assert_array_equal(load_mesh(path).vertices, v)

    def test_slash_indices_and_comments(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text(
            "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
            "vn 0 0 1\nvt 0 0\ns off\nf 1/1/1 2/1/1 3/1/1\nf 1//1 3//1 4//1\n"
        )
        m = load_mesh(path)
        assert m.faces.tolist() == [[0, 1, 2], [0, 2, 3]]

    def test_quad_fan_triangulation(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        m = load_mesh(path)
        assert m.faces.tolist() == [[0, 1, 2], [0, 2, 3]]

    def test_face_index_error_carries_line(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
        with pytest.raises(FaceIndexError, match="line 4"):
            load_mesh(path)

    def test_unknown_keyword_rejected(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 0\nwibble 1 2 3\n")
        with pytest.raises(ParseError, match="line 2"):
            load_mesh(path)

    def test_no_faces_rejected(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\n")
        with pytest.raises(EmptyMeshError):
            load_mesh(path)


class TestOff:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.off"
        save_mesh(tetra(), path, format="off")
        back = load_mesh(path)
        np.testing.assert_array_equal(back.vertices, TETRA_V)
        np.testing.assert_array_equal(back.faces, TETRA_F)

    def test_counts_on_header_line(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
        assert load_mesh(path).faces.tolist() == [[0, 1, 2]]

    def test_truncated_vertex_block(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n")
        with pytest.raises(ParseError, match="vertex"):
            load_mesh(path)

    def test_bad_face_index(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n")
        with pytest.raises(FaceIndexError):
            load_mesh(path)

    def test_format_inferred_from_extension(self, tmp_path):
        path = tmp_path / "m.off"
        save_mesh(tetra(), path)
        assert path.read_text().startswith("OFF")


class TestPointCloudIO:
    @pytest.mark.parametrize("fmt", ["xyz", "csv", "ply"])
    def test_round_trip(self, tmp_path, fmt):
        points = np.array([[0.1, -2.5, 3e-8], [1 / 3, 2 / 7, -1e5]])
        path = tmp_path / f"c.{fmt}"
        save_point_cloud(PointCloud(points), path)
        np.testing.assert_array_equal(load_point_cloud(path).points, points)

    def test_xyz_wrong_arity(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("0 0 0\n1 2\n")
        with pytest.raises(ParseError, match="line 2"):
            load_point_cloud(path)

    def test_csv_header_enforced(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("a,b,c\n0,0,0\n")
        with pytest.raises(ParseError):
            load_point_cloud(path)

    def test_ply_binary_rejected(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
            "property float x\nproperty float y\nproperty float z\nend_header\n"
        )
        with pytest.raises(ParseError, match="ascii"):
            load_point_cloud(path)

    def test_ply_property_order_respected(self, tmp_path):
        path = tmp_path / "c.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property float z\nproperty float x\nproperty float y\nend_header\n"
            "3 1 2\n"
        )
        cloud = load_point_cloud(path)
        np.testing.assert_array_equal(cloud.points, [[1.0, 2.0, 3.0]])

    def test_empty_cloud_file_loads_as_zero_points(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("\n")
        assert load_point_cloud(path).count == 0

    def test_empty_cloud_save_round_trip(self, tmp_path):
        path = tmp_path / "c.xyz"
        save_point_cloud(PointCloud(np.zeros((0, 3))), path)
        assert load_point_cloud(path).count == 0

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "c.weird"
        path.write_text("0 0 0\n")
        with pytest.raises(ParseError):
            load_point_cloud(path)


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet=st.characters(codec="utf-8", exclude_characters="\x00"), max_size=400))
def test_obj_parser_total_on_garbage(tmp_path_factory, text):
    """Arbitrary text either parses or raises a typed error, never crashes."""
    path = tmp_path_factory.mktemp("fuzz") / "f.obj"
    path.write_text(text, encoding="utf-8")
    try:
        load_mesh(path)
    except (ParseError, EmptyMeshError):
        pass


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=3, max_size=3
        ),
        min_size=1,
        max_size=30,
    )
)
def test_cloud_round_trip_property(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("rt") / "c.xyz"
    cloud = PointCloud(np.asarray(rows, dtype=np.float64))
    save_point_cloud(cloud, path)
    np.testing.assert_array_equal(load_point_cloud(path).points, cloud.points)
