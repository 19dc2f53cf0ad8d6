"""
Used for pytest fixtures and anything else test setup/teardown related.
"""
import asyncio

import pytest
try:
    import uvloop
    LOOP = uvloop.new_event_loop
except ImportError:
    print("Missing: uvloop, using the default asyncio loop")
    LOOP = asyncio.new_event_loop

import hdl.cli
import hdl.generators
import hdl.gridrep
import hdl.parse

SMALL_GRID = hdl.gridrep.GridSpec(20, 28, 6.0, 6.0)


@pytest.fixture
def event_loop():
    """
    Provide a a new test loop for each test.
    Use uvloop if available.

    To test: event_loop.run_until_complete(coroutine)
    """
    loop = LOOP()
    loop.set_debug(True)

    yield loop

    loop.close()


@pytest.fixture(scope='session')
def f_defs():
    """
    The builtin generators, parsed once.
    """
    yield hdl.generators.builtin_generators()


@pytest.fixture(scope='session')
def f_small_spec():
    """
    A small half plane grid, coarse but with clean clusters at cluster_tol 0.05.
    """
    yield SMALL_GRID


@pytest.fixture(scope='session')
def f_small_prim(f_small_spec):
    yield hdl.gridrep.build_primitives(f_small_spec, max_dim=5000)


@pytest.fixture(scope='session')
def f_small_ham(f_small_prim):
    """
    H at k = 1 on the small grid.
    """
    yield hdl.gridrep.build_hamiltonian(1.0, f_small_prim)


@pytest.fixture(scope='session')
def f_small_levels(f_small_ham):
    """
    Lowest four clustered positive levels of H at k = 1.
    """
    esys = hdl.gridrep.positive_branch(hdl.gridrep.eigh(f_small_ham))
    yield hdl.gridrep.cluster_levels(esys, 0.05, limit=4)


@pytest.fixture
def f_run_file(tmpdir):
    """
    A run file that shrinks every grid so actions finish quickly.
    """
    fname = tmpdir.join('run.cfg')
    fname.write("""# small grids for tests
run.grid.M1=20
run.grid.M2=28
run.grid.L1=6.0
run.grid.L2=6.0
tolerances.cluster_tol=0.05
sweep.levels=4
""")
    yield str(fname)


@pytest.fixture
def f_config(f_run_file):
    """
    RunConfig built from defaults and the small run file.
    """
    args = hdl.parse.make_parser().parse_args(['verify-numeric', '--config', f_run_file])
    yield hdl.cli.build_config(args)
