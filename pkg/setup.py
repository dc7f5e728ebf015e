"""Setup script for the rdlab package.

pyproject.toml is the source of truth; this file is kept for tools that
still expect a setup script.
"""

from setuptools import setup, find_packages

setup(
    name='rdlab',
    version='0.1.0',
    description='Radial simulator and bound checker for slow-diffusion reaction equations',
    author='Your Name',
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={'rdlab.generators': ['templates/*.j2']},
    install_requires=[
        'Jinja2>=3.1.0',
        'Click>=8.1.0',
        'numpy>=1.22',
        'scipy>=1.8',
        'pandas>=1.4',
    ],
    entry_points={
        'console_scripts': [
            'rdlab=rdlab.cli:cli',
        ],
    },
)
