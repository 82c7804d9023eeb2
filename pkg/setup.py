import sys
from setuptools import setup, find_packages

if sys.version_info < (3, 8):
    raise Exception("Python 3.8 or higher is required. Your version is %s." % sys.version)

__version__ = ""
exec(open('rotor_bands/__version__.py').read())

long_description = open('README.rst').read()

setup(
    name='rotor-bands',
    packages=find_packages(exclude=["*.tests", "*.tests.*", "tests.*", "tests"]),
    version=__version__,
    description='Quasi-energy band structure of the quantum kicked rotor at resonance.',
    long_description=long_description,
    license='AGPLv3+',
    include_package_data=True,
    python_requires='>=3.8',
    keywords=['kicked rotor', 'quantum resonance', 'Floquet', 'quasi-energy bands', 'Gauss sums'],
    classifiers=[
        "Development Status :: 4 - Beta",
        "License :: OSI Approved :: GNU Affero General Public License v3 or later (AGPLv3+)",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.8",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],
    install_requires=[
        "numpy>=1.20",
        "scipy>=1.6",
        "mpmath>=1.2",
        "sympy>=1.8",
        "PyYaml>=5.3",
    ],
    extras_require={
        "dev": ["pytest", "coverage", "mypy", "doit", "build", "twine"],
    },
    entry_points={
        "console_scripts": ["rotor-bands = rotor_bands.__main__:main"],
    }
)
