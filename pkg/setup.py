from setuptools import setup

setup(
    name='growing-domains',
    version='0.1.0',
    description='Reaction-diffusion on growing, segmented 2D domains',
    py_modules=['displacement', 'fixtures', 'geometry', 'io_utils', 'mesh',
                'output', 'sim_utils', 'simulate', 'solver', 'ui', 'utils'],
    packages=['kinetics', 'pipelines'],
    install_requires=['numpy', 'scipy', 'PyYAML', 'triangle', 'shapely'],
    extras_require={'test': ['pytest']},
)
