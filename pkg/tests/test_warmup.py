from stockbench.engine import new_state, warmup, warmup_levels

from conftest import make_costs, make_series, uncapped


def oracle_single_echelon(demands, lead, z, length):
    """Independent scalar simulation of the warmup rule for one SKU at the
    top echelon: order up to z on position, factory ships at order time,
    arrivals usable the step after they land."""
    inv = 0
    pipe = {}
    for t in range(length):
        in_transit = sum(pipe.values())
        order = max(z - inv - in_transit, 0)
        if order:
            pipe[t + lead] = pipe.get(t + lead, 0) + order
        sold = min(demands[t], inv)
        arrived = pipe.pop(t, 0)
        inv = inv - sold + arrived
    return inv, sum(pipe.values())


def test_warmup_zero_length_is_identity():
    series = make_series([[5]] * 10, lead=2)
    costs = make_costs(series)
    state = new_state(1, 1)
    before = state.copy()
    state = warmup(state, series, costs, uncapped(1), 0)
    assert state.equal(before)


def test_warmup_levels_deterministic_demand():
    # demand 5/step, lead 2 -> order up to 5 * (2 + 1) = 15
    series = make_series([[5]] * 20, lead=2)
    levels = warmup_levels(series, 0, 20)
    assert levels.tolist() == [15]


def test_warmup_matches_hand_simulation():
    length = 37
    demands = [5] * length
    series = make_series([[5]] * (length + 5), lead=2)
    costs = make_costs(series)
    state = new_state(1, 1)
    state = warmup(state, series, costs, uncapped(1), length)
    inv, in_transit = oracle_single_echelon(demands, 2, 15, length)
    assert state.inventory[0, 0] == inv
    assert state.in_transit[0, 0] == in_transit
    assert state.t == length


def test_warmup_is_deterministic(fuzz_instances):
    inst = fuzz_instances[2]
    length = min(inst.horizon, 15)
    s1 = warmup(new_state(inst.m, inst.n), inst.series, inst.costs, inst.warehouses, length)
    s2 = warmup(new_state(inst.m, inst.n), inst.series, inst.costs, inst.warehouses, length)
    assert s1.equal(s2)


def test_warmup_builds_stock_against_demand():
    series = make_series([[7]] * 60, lead=3)
    costs = make_costs(series)
    state = warmup(new_state(1, 1), series, costs, uncapped(1), 50)
    assert state.inventory[0, 0] + state.in_transit[0, 0] > 0
