import _vrtpp as v


def test_case_study_scenario():
    scn = v.case_study_scenario()
    assert scn.total_profit() == 10
    assert scn.n_total() == 17
    scn.validate()


def test_generate_roundtrip(tmp_path):
    scn = v.generate_instance(7, 2, 4)
    path = tmp_path / "instance.json"
    v.save_scenario(scn, str(path))
    again = v.load_scenario(str(path))
    assert again.to_json() == scn.to_json()
    assert v.generate_instance(7, 2, 4).to_json() == scn.to_json()


def test_gap_to_ideal():
    assert abs(v.gap_to_ideal(5.0, [10.0]) - 50.0) < 1e-12
    assert abs(v.gap_to_ideal(10.0 - 0.0005 * 1337.94, [2, 1, 3, 1, 3]) - 6.6897) < 1e-3


def test_transfer_dv_and_grid():
    a = v.OrbitalElements()
    b = v.OrbitalElements()
    b.M0 = 0.3
    dv = v.transfer_dv(a, b, 0.0, 3.0)
    assert dv is not None and dv > 0
    csv = v.dv_grid_csv(a, b, 0.0, 5.0, 0.5, 5.0, n_dep=5, n_tof=5)
    assert csv.splitlines()[0] == "t_dep_tu,t_tr_tu,dv_kms"
    assert len(csv.splitlines()) == 26


def test_solve_path_tiny():
    scn = v.generate_instance(3, 1, 2)
    scn.milp_time_limit_s = 10
    sol = v.solve_path(scn)
    assert sol.method == "path"
    assert sol.targets_visited >= 0
    assert "routes" in sol.to_json()
