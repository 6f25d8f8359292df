import setuptools

setuptools.setup(
    name='latkit',
    version="0.1.0",
    packages=setuptools.find_packages(exclude=['tests*']),
    include_package_data=True,
    package_data={'latkit': ['data/*.json']},
    install_requires=['scipy', 'numpy', 'sympy'],
    entry_points={'console_scripts': ['latkit=latkit.cli:main']},
)
