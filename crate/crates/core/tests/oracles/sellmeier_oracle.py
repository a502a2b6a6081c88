# independent evaluation of the temperature-dependent Sellmeier form
import numpy as np
c_nm_thz=299792.458; c_mm_ps=0.299792458
E=dict(a1=4.5615,a2=0.08488,a3=0.1927,a4=5.5832,a5=8.3067,a6=0.021696,b1=4.782e-7,b2=3.0913e-8,b3=2.7326e-8,b4=1.4837e-5)
O=dict(a1=4.5082,a2=0.084888,a3=0.19552,a4=1.1570,a5=8.2517,a6=0.0237,b1=2.0704e-8,b2=1.4449e-8,b3=1.5978e-8,b4=4.7686e-6)
def n(co,lam_nm,T):
    l=lam_nm/1000; f=(T-24.5)*(T+570.82)
    n2=co['a1']+co['b1']*f+(co['a2']+co['b2']*f)/(l**2-(co['a3']+co['b3']*f)**2)+(co['a4']+co['b4']*f)/(l**2-co['a5']**2)-co['a6']*l**2
    return np.sqrt(n2)
def k(co,nu,T): return 2*np.pi*n(co,c_nm_thz/nu,T)*nu/c_mm_ps
def vinv(co,lam,T,h=1e-4):
    nu=c_nm_thz/lam; return (k(co,nu+h,T)-k(co,nu-h,T))/(2*h)/(2*np.pi)
T=40.8
for nm,co in [('e',E),('o',O)]:
    print(nm, 'n792 %.12f n1584 %.12f n1200 %.12f'%(n(co,792,T),n(co,1584,T),n(co,1200,T)), 'n1584@24.5 %.12f'%n(co,1584,24.5), 'vinv1584 %.9f vinv792 %.9f'%(vinv(co,1584,T),vinv(co,792,T)))
nud=c_nm_thz/1584
for pump in ['o','e']:
    cp=O if pump=='o' else E
    dk=k(cp,2*nud,T)-k(E,nud,T)-k(O,nud,T)
    print('pump',pump,'Lambda_um %.9f'%(2*np.pi/dk*1000))
print('gvm |Vs-Vi| %.9f'%abs(vinv(E,1584,T)-vinv(O,1584,T)))
