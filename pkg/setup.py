"""
The setup file for packaging hdl
"""
import os
import pathlib
import shlex
import subprocess as sub
import sys
import tempfile
from setuptools import setup, find_packages, Command

import hdl

ROOT = os.path.abspath(os.path.dirname(__file__))
if os.path.dirname(__file__) == '':
    ROOT = os.getcwd()
COVER = '--cov=hdl --cov=hdlio'


def make_get_input():
    """
    Wrap input so that --yes on the command line answers every prompt.
    """
    default = '--yes' in sys.argv
    if default:
        sys.argv.remove('--yes')

    def inner_get_input(msg):
        return 'yes' if default else input(msg)
    inner_get_input.default = default

    return inner_get_input


get_input = make_get_input()


def pytest_has_cov():
    """ True when pytest reports the pytest-cov plugin. """
    cap = sub.run(shlex.split('python -m pytest --trace-config --co'),
                  stdout=sub.PIPE, stderr=sub.STDOUT)
    return 'pytest-cov' in cap.stdout.decode()


class Clean(Command):
    """
    Remove build leftovers and caches under the project.
    """
    user_options = []

    def initialize_options(self):
        pass

    def finalize_options(self):
        pass

    def run(self):
        root = pathlib.Path(ROOT)
        rm_list = [path for path in root.glob('**/*.pyc') if root / '.tox' not in path.parents]
        rm_list += list(root.glob('*.egg-info')) + list(root.glob('*.egg'))
        rm_list += [root / name for name in ('.eggs', '.tox', '.pytest_cache', 'build', 'dist')]

        print("Removing:")
        for path in rm_list:
            print("\t{}".format(path))
        if get_input('OK? y/n  ').strip().lower().startswith('y'):
            sub.run(['rm', '-vrf'] + [str(path) for path in rm_list])


class InstallDeps(Command):
    """
    Install dependencies to run & test.
    """
    description = "Install the depencies for the project."
    user_options = [
        ('force=', None, "Bypass prompt."),
    ]

    def initialize_options(self):
        self.force = None

    def finalize_options(self):
        pass

    def run(self):
        cmd = 'pip install -U ' + ' '.join(RUN_DEPS + TEST_DEPS)
        print('Executing: ' + cmd)
        recv = self.force if self.force else get_input('OK? y/n  ').strip().lower()
        if not recv.startswith('y'):
            return

        try:
            sub.run(shlex.split(cmd), check=True, timeout=300)
        except sub.TimeoutExpired:
            print('Deps installation took over 300 seconds, something is wrong.')
        except sub.CalledProcessError:
            print("Error during pip installation, check pip.")


class Test(Command):
    """
    Run the tests and track coverage.
    """
    user_options = []

    def initialize_options(self):
        pass

    def finalize_options(self):
        pass

    def run(self):
        if not pytest_has_cov():
            print('Please run: python setup.py deps')
            sys.exit(1)

        old_cwd = os.getcwd()
        try:
            os.chdir(ROOT)
            sub.run(shlex.split('python -m pytest ' + COVER), check=True)
        finally:
            os.chdir(old_cwd)


class Coverage(Command):
    """
    Run the tests and write the html coverage report to a temporary directory.
    """
    user_options = []

    def initialize_options(self):
        pass

    def finalize_options(self):
        pass

    def run(self):
        if not pytest_has_cov():
            print('Please run: python setup.py deps')
            sys.exit(1)

        cov_dir = os.path.join(tempfile.gettempdir(), 'HDLCoverage')
        old_cwd = os.getcwd()
        try:
            os.chdir(ROOT)
            for cmd in ('python -m pytest ' + COVER, 'coverage html -d ' + cov_dir):
                sub.run(shlex.split(cmd), check=True)
            print("Final report available at: ", os.path.join(cov_dir, 'index.html'))
        except sub.CalledProcessError as exc:
            print("Error occurred running: {}".format(exc.cmd))
            sys.exit(1)
        finally:
            os.chdir(old_cwd)


SHORT_DESC = 'Spectrum and Higgs algebra laboratory for the Dirac Smorodinsky-Winternitz system.'
RUN_DEPS = ['argparse', 'numpy', 'pyyaml', 'scipy', 'sympy', 'uvloop']
TEST_DEPS = ['coverage', 'flake8', 'pylint', 'pytest', 'pytest-cov', 'tox']
setup(
    name='hdl',
    version=hdl.__version__,
    description=SHORT_DESC,
    long_description=SHORT_DESC,
    license='BSD',
    platforms=['any'],

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Framework :: AsyncIO',
        'Framework :: Pytest',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    keywords='dirac superintegrable higgs-algebra spectrum',

    packages=find_packages(exclude=['venv', '.tox', 'tests*', 'examples*']),
    install_requires=RUN_DEPS,
    tests_require=TEST_DEPS,
    extras_require={
        'test': TEST_DEPS,
    },

    # data/config.yml and data/log.yml are read relative to the checkout.
    entry_points={
        'console_scripts': [
            'hdl = hdl.cli:main',
        ],
    },

    cmdclass={
        'clean': Clean,
        'coverage': Coverage,
        'deps': InstallDeps,
        'test': Test,
    }
)
